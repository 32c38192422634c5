#include "mpep/rate_functional.hpp"

#include <cmath>
#include <stdexcept>

#include "mpep/errors.hpp"

namespace mpep {

namespace {

// Derivative of the interpolating parabola through (ta,xa), (tb,xb), (tc,xc)
// evaluated at te.
Vec parabola_derivative(double ta, const Vec& xa, double tb, const Vec& xb,
                        double tc, const Vec& xc, double te) {
    return xa * ((2 * te - tb - tc) / ((ta - tb) * (ta - tc))) +
           xb * ((2 * te - ta - tc) / ((tb - ta) * (tb - tc))) +
           xc * ((2 * te - ta - tb) / ((tc - ta) * (tc - tb)));
}

}  // namespace

ActionReport action(const Path& path, const VectorFieldModel& model, double mu) {
    if (path.size() < 3) throw std::invalid_argument("action: need at least 3 grid points");
    for (std::size_t i = 0; i + 1 < path.size(); ++i)
        if (!(path.times[i] < path.times[i + 1]))
            throw std::invalid_argument("action: degenerate time grid");
    if (path.dim() != model.n) throw std::invalid_argument("action: dimension mismatch");

    const std::size_t n = path.size();
    Vec integrand(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        Vec du;
        if (i == 0) {
            du = parabola_derivative(path.times[0], path.state(0), path.times[1], path.state(1),
                                     path.times[2], path.state(2), path.times[0]);
        } else if (i == n - 1) {
            du = parabola_derivative(path.times[n - 3], path.state(n - 3), path.times[n - 2],
                                     path.state(n - 2), path.times[n - 1], path.state(n - 1),
                                     path.times[n - 1]);
        } else {
            du = parabola_derivative(path.times[i - 1], path.state(i - 1), path.times[i],
                                     path.state(i), path.times[i + 1], path.state(i + 1),
                                     path.times[i]);
        }
        integrand(static_cast<Eigen::Index>(i)) =
            0.5 * (du - drift(model, path.state(i), mu)).squaredNorm();
    }

    ActionReport rep;
    rep.grid_size = static_cast<int>(n);
    const std::size_t m = n - 1;  // interval count
    if (path.uniform_grid() && m >= 2) {
        rep.quadrature = QuadratureRule::Simpson;
        const double h = path.times[1] - path.times[0];
        double val = 0.0;
        std::size_t simpson_end = (m % 2 == 0) ? m : m - 3;
        for (std::size_t i = 0; i + 2 <= simpson_end; i += 2)
            val += h / 3.0 * (integrand(i) + 4.0 * integrand(i + 1) + integrand(i + 2));
        if (m % 2 != 0) {
            if (m >= 3)
                val += 3.0 * h / 8.0 *
                       (integrand(m - 3) + 3.0 * integrand(m - 2) + 3.0 * integrand(m - 1) + integrand(m));
            else  // two points handled above; m==1 cannot happen (n>=3)
                val += 0.5 * h * (integrand(0) + integrand(1));
        }
        rep.value = val;
    } else {
        rep.quadrature = QuadratureRule::Trapezoid;
        double val = 0.0;
        for (std::size_t i = 0; i + 1 < n; ++i)
            val += 0.5 * (path.times[i + 1] - path.times[i]) * (integrand(i) + integrand(i + 1));
        rep.value = val;
    }
    return rep;
}

double gradient_lower_bound(const VectorFieldModel& model, const Vec& a, const Vec& b) {
    if (!model.has_potential())
        throw UnsupportedModelError("gradient_lower_bound: model has no potential");
    return 2.0 * (model.potential(b) - model.potential(a));
}

double action_excess(const Path& path, const VectorFieldModel& model, double mu) {
    if (mu != 0.0)
        throw UnsupportedModelError("action_excess: gradient decomposition requires mu = 0");
    const ActionReport rep = action(path, model, mu);
    return rep.value - gradient_lower_bound(model, path.start(), path.end());
}

double action_tail_bound(const Equilibrium& eq, double endpoint_distance) {
    const double jn = eq.jacobian.operatorNorm();
    const double gap = eq.spectral_gap();
    return jn * jn * endpoint_distance * endpoint_distance / gap;
}

}  // namespace mpep
