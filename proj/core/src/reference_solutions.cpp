#include "mpep/reference_solutions.hpp"

#include <cmath>

namespace mpep {

Eigen::Vector2d double_well_heteroclinic(double t) {
    if (t < -350.0) return {0.0, 0.0};
    return {-1.0 / std::sqrt(std::exp(-2.0 * t) + 1.0), 0.0};
}

Eigen::Vector2d double_well_escape_correction(double t) {
    double w;
    if (t >= 6.0) {
        w = std::exp(-t) * (0.5 - t - std::log(2.0)) - 0.375 * std::exp(-3.0 * t);
    } else if (t <= -350.0) {
        w = 0.0;
    } else {
        const double et = std::exp(t);
        w = -et + std::sqrt(et * et + 1.0) - std::exp(-t) * std::asinh(et);
    }
    return {0.0, w};
}

Eigen::Vector2d double_well_costate_correction(double t) {
    double v;
    if (t >= 6.0) {
        // 2 e^{-t} asinh(e^t) - 2/sqrt(e^{2t}+1), stabilized:
        // asinh(e^t) = t + log 2 + log1p((sqrt(1+e^{-2t}) - 1)/2)
        const double emt = std::exp(-t);
        const double s = std::sqrt(1.0 + emt * emt);
        v = 2.0 * emt * (t + std::log(2.0) + std::log1p(0.5 * (s - 1.0))) - 2.0 * emt / s;
    } else if (t <= -350.0) {
        v = 0.0;
    } else {
        const double et = std::exp(t);
        v = 2.0 * std::exp(-t) * std::asinh(et) - 2.0 / std::sqrt(et * et + 1.0);
    }
    return {0.0, v};
}

}  // namespace mpep
