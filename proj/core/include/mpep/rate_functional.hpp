#ifndef MPEP_RATE_FUNCTIONAL_HPP
#define MPEP_RATE_FUNCTIONAL_HPP

#include "mpep/equilibrium.hpp"
#include "mpep/model.hpp"

namespace mpep {

enum class QuadratureRule { Trapezoid, Simpson };

struct ActionReport {
    double value = 0.0;
    QuadratureRule quadrature = QuadratureRule::Simpson;
    int grid_size = 0;
};

/// Large-deviations action  (1/2) int |u' - (f + mu g)(u)|^2 dt  along a
/// discrete path. Derivatives are 2nd-order centered in the interior and
/// 2nd-order one-sided at the ends; the quadrature is composite Simpson on
/// uniform grids (3/8 rule absorbing an odd final panel) and trapezoid
/// otherwise. Requires >= 3 points; repeated times are rejected.
ActionReport action(const Path& path, const VectorFieldModel& model, double mu);

/// 2 (V(b) - V(a)); the exact minimum of the action over paths from a to b
/// when f = -grad V. Throws UnsupportedModelError without a potential.
double gradient_lower_bound(const VectorFieldModel& model, const Vec& a, const Vec& b);

/// action(path) - gradient_lower_bound(start, end); the residual square
/// integral (1/2) int |u' - grad V(u)|^2. Gradient decomposition only:
/// mu must be 0 and the model must carry a potential.
double action_excess(const Path& path, const VectorFieldModel& model, double mu);

/// Crude upper estimate ||J||^2 r^2 / gap of the action carried by the
/// exponential tail beyond a truncation point at distance r from the
/// equilibrium. Reported alongside truncated-path actions so the
/// truncation error stays visible.
double action_tail_bound(const Equilibrium& eq, double endpoint_distance);

}  // namespace mpep

#endif
