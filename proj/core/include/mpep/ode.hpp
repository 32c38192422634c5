#ifndef MPEP_ODE_HPP
#define MPEP_ODE_HPP

#include <functional>
#include <vector>

#include "mpep/path.hpp"

namespace mpep {

/// Adaptive embedded Runge-Kutta 5(4) (Dormand-Prince). Used for invariant
/// drift tests, trajectory diagnostics and initial-guess shooting; the
/// heteroclinic computations themselves go through the collocation solver.
struct IntegrationOptions {
    double abs_tol = 1e-10;
    double rel_tol = 1e-10;
    double h_init = 1e-3;
    double h_max = 1.0;
    long max_steps = 5'000'000;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<Vec> states;
    bool stopped_early = false;  // stop predicate fired before t1

    Path to_path() const;
    Vec sample(double t) const;  // cubic Hermite between accepted steps
    void set_derivatives(std::vector<Vec> d) { derivs_ = std::move(d); }
    const std::vector<Vec>& derivatives() const { return derivs_; }

private:
    std::vector<Vec> derivs_;
    friend Trajectory integrate(const std::function<Vec(const Vec&)>&, const Vec&,
                                double, double, const IntegrationOptions&,
                                const std::function<bool(double, const Vec&)>&);
};

/// Integrates x' = rhs(x) from (t0, x0) to t1, recording accepted steps.
/// If `stop` is set and returns true the integration halts at that step.
Trajectory integrate(const std::function<Vec(const Vec&)>& rhs, const Vec& x0,
                     double t0, double t1, const IntegrationOptions& opts = {},
                     const std::function<bool(double, const Vec&)>& stop = nullptr);

}  // namespace mpep

#endif
