#ifndef MPEP_COLLOCATION_HPP
#define MPEP_COLLOCATION_HPP

#include <array>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "mpep/path.hpp"

namespace mpep {

/// Piecewise-polynomial collocation of degree 3 at Gauss points for
/// two-point boundary-value problems
///
///     z'(t) = F(t, z, p),   t in [tmesh.front(), tmesh.back()],
///
/// with p a (possibly empty) vector of free scalar parameters. Unknowns are
/// the mesh states, the stage derivatives of the 3-stage Gauss-Legendre
/// scheme on each interval, and p. Besides the interior collocation and
/// continuity equations the problem carries
///   - boundary rows     a . z(endpoint) = b          (affine, one end each)
///   - mesh rows         sum_i W_i . z_i + wp . p = b (affine over all mesh
///                       states; used for integral phase conditions and
///                       kernel normalizations)
/// Well-posedness requires  #boundary rows + #mesh rows == dim + #params,
/// which is checked up front.
///
/// The Newton systems are solved by sparse LU on the block-banded
/// collocation matrix.

struct CollocationSystem {
    int dim = 0;
    int n_params = 0;
    std::function<Vec(double t, const Vec& z, const Vec& p)> rhs;
    std::function<Mat(double t, const Vec& z, const Vec& p)> jac_z;
    // dim x n_params; required when n_params > 0
    std::function<Mat(double t, const Vec& z, const Vec& p)> jac_p;
};

struct BoundaryRow {
    enum class End { Left, Right };
    End end = End::Left;
    Vec coeffs;
    double value = 0.0;
};

struct MeshRow {
    Mat weights;        // (#mesh points) x dim
    Vec param_weights;  // may be empty
    double value = 0.0;
};

struct CollocationOptions {
    double newton_tol = 1e-10;  // infinity norm of the residual
    int max_newton = 25;
    bool estimate_condition = true;
    double singular_tol = 1e-14;  // pivot threshold reported by the LU
};

struct CollocationResult {
    std::vector<double> tmesh;
    Mat states;                // (#points) x dim
    std::vector<Mat> stages;   // per interval: 3 x dim stage derivatives
    Vec params;
    double residual_norm = std::numeric_limits<double>::quiet_NaN();
    int newton_iters = 0;
    bool converged = false;
    double condition_estimate = std::numeric_limits<double>::quiet_NaN();

    Path to_path() const;
    /// Collocation polynomial (degree 3 per interval); t clamped to range.
    Vec eval(double t) const;
    /// Derivative of the collocation polynomial (degree 2 per interval).
    Vec eval_derivative(double t) const;
};

/// Solves the collocation equations by a damped Newton iteration from the
/// given mesh-state guess. Throws IllPosedProblemError on a row/unknown
/// count mismatch and NoConnectionError when Newton fails to converge.
CollocationResult solve_collocation(const CollocationSystem& sys,
                                    const std::vector<double>& tmesh,
                                    const Mat& guess_states,
                                    const Vec& guess_params,
                                    const std::vector<BoundaryRow>& boundary_rows,
                                    const std::vector<MeshRow>& mesh_rows,
                                    const CollocationOptions& opts = {});

/// Trapezoid weights for the mesh (used to build integral mesh rows).
std::vector<double> trapezoid_weights(const std::vector<double>& tmesh);

/// Collocation node abscissae on [0,1] (3-point Gauss-Legendre).
std::array<double, 3> gauss_nodes();

}  // namespace mpep

#endif
