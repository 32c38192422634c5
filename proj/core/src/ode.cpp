#include "mpep/ode.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mpep {

namespace {

// Dormand-Prince 5(4) coefficients (Hairer, Norsett & Wanner, Solving ODEs I).
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
// embedded 4th-order weights
constexpr double e1 = 5179.0 / 57600, e3 = 7571.0 / 16695, e4 = 393.0 / 640, e5 = -92097.0 / 339200,
                 e6 = 187.0 / 2100, e7 = 1.0 / 40;

}  // namespace

Path Trajectory::to_path() const {
    Path p;
    p.times = times;
    if (!states.empty()) {
        p.states = Mat(states.size(), states.front().size());
        for (std::size_t i = 0; i < states.size(); ++i) p.states.row(static_cast<Eigen::Index>(i)) = states[i].transpose();
    }
    return p;
}

Vec Trajectory::sample(double t) const {
    if (times.empty()) throw std::runtime_error("trajectory: empty");
    if (t <= times.front()) return states.front();
    if (t >= times.back()) return states.back();
    auto it = std::upper_bound(times.begin(), times.end(), t);
    const std::size_t i = static_cast<std::size_t>(it - times.begin()) - 1;
    const double h = times[i + 1] - times[i];
    const double s = (t - times[i]) / h;
    if (derivs_.size() == times.size()) {
        // cubic Hermite
        const double s2 = s * s, s3 = s2 * s;
        return (2 * s3 - 3 * s2 + 1) * states[i] + (s3 - 2 * s2 + s) * h * derivs_[i] +
               (-2 * s3 + 3 * s2) * states[i + 1] + (s3 - s2) * h * derivs_[i + 1];
    }
    return (1.0 - s) * states[i] + s * states[i + 1];
}

Trajectory integrate(const std::function<Vec(const Vec&)>& rhs, const Vec& x0,
                     double t0, double t1, const IntegrationOptions& opts,
                     const std::function<bool(double, const Vec&)>& stop) {
    if (!(t1 > t0)) throw std::invalid_argument("integrate: need t1 > t0");
    Trajectory traj;
    std::vector<Vec> derivs;

    Vec x = x0;
    Vec k1 = rhs(x);
    double t = t0;
    double h = std::min({opts.h_init, opts.h_max, t1 - t0});

    traj.times.push_back(t);
    traj.states.push_back(x);
    derivs.push_back(k1);

    long steps = 0;
    while (t < t1) {
        if (++steps > opts.max_steps) throw std::runtime_error("integrate: max step count exceeded");
        h = std::min(h, t1 - t);

        const Vec k2 = rhs(x + h * (a21 * k1));
        const Vec k3 = rhs(x + h * (a31 * k1 + a32 * k2));
        const Vec k4 = rhs(x + h * (a41 * k1 + a42 * k2 + a43 * k3));
        const Vec k5 = rhs(x + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        const Vec k6 = rhs(x + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        const Vec x5 = x + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        const Vec k7 = rhs(x5);  // FSAL
        const Vec x4 = x + h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        double err = 0.0;
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            const double sc = opts.abs_tol + opts.rel_tol * std::max(std::abs(x(i)), std::abs(x5(i)));
            err = std::max(err, std::abs(x5(i) - x4(i)) / sc);
        }

        if (err <= 1.0) {
            t += h;
            x = x5;
            k1 = k7;
            traj.times.push_back(t);
            traj.states.push_back(x);
            derivs.push_back(k1);
            if (stop && stop(t, x)) {
                traj.stopped_early = true;
                break;
            }
        }
        const double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
        h *= std::clamp(fac, 0.2, 5.0);
        h = std::min(h, opts.h_max);
        if (h < 1e-14 * std::max(1.0, std::abs(t)))
            throw std::runtime_error("integrate: step size underflow");
    }

    traj.set_derivatives(std::move(derivs));
    return traj;
}

}  // namespace mpep
