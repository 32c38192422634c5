#include <doctest.h>

#include <cmath>
#include <random>

#include "mpep/errors.hpp"
#include "mpep/ode.hpp"
#include "mpep/rate_functional.hpp"
#include "mpep/reference_solutions.hpp"
#include "test_util.hpp"

using namespace mpep;

namespace {

Vec v2(double a, double b) {
    Vec x(2);
    x << a, b;
    return x;
}

// time-reversed heteroclinic y0(t) = h(-t) on a uniform grid
Path reversed_het_path(double T, int n_points) {
    Path p;
    p.times.resize(static_cast<std::size_t>(n_points));
    p.states = Mat(n_points, 2);
    for (int i = 0; i < n_points; ++i) {
        const double t = -T + 2 * T * i / (n_points - 1);
        p.times[static_cast<std::size_t>(i)] = t;
        p.states.row(i) = double_well_heteroclinic(-t).transpose();
    }
    return p;
}

}  // namespace

TEST_CASE("action vanishes on deterministic trajectories") {
    const auto m = builtin_double_well();
    auto rhs = [&m](const Vec& x) { return drift(m, x, 0.0); };
    const Trajectory tr = integrate(rhs, v2(-0.4, 0.6), 0.0, 10.0);
    Path p;
    p.times.resize(2001);
    p.states = Mat(2001, 2);
    for (int i = 0; i <= 2000; ++i) {
        const double t = 10.0 * i / 2000;
        p.times[static_cast<std::size_t>(i)] = t;
        p.states.row(i) = tr.sample(t).transpose();
    }
    CHECK(action(p, m, 0.0).value <= 1e-6);
}

TEST_CASE("action of the time-reversed heteroclinic is 2(V(b) - V(a))") {
    const auto m = builtin_double_well();
    const auto rep = action(reversed_het_path(20, 2001), m, 0.0);
    CHECK(rep.quadrature == QuadratureRule::Simpson);
    CHECK(std::abs(rep.value - 0.5) <= 1e-4);
}

TEST_CASE("action of a constant path at the attractor is zero") {
    const auto m = builtin_double_well();
    Path p;
    p.times = {0.0, 0.5, 1.0, 1.5};
    p.states = Mat(4, 2);
    for (int i = 0; i < 4; ++i) p.states.row(i) = v2(-1, 0).transpose();
    CHECK(action(p, m, 0.0).value <= 1e-30);
}

TEST_CASE("straight-line action regression pin") {
    // frozen from an independent quadrature of the same estimator
    const auto m = builtin_double_well();
    Path p;
    p.times.resize(401);
    p.states = Mat(401, 2);
    for (int i = 0; i <= 400; ++i) {
        const double t = static_cast<double>(i) / 400;
        p.times[static_cast<std::size_t>(i)] = t;
        p.states.row(i) = v2(-1.0 + t, 0.0).transpose();
    }
    const double val = action(p, m, 0.0).value;
    CHECK(val == doctest::Approx(0.788095238103).epsilon(1e-10));
    CHECK(val > 0.5);
}

TEST_CASE("degenerate grids are rejected") {
    const auto m = builtin_double_well();
    Path p;
    p.times = {0.0, 0.0, 1.0};
    p.states = Mat::Zero(3, 2);
    CHECK_THROWS_AS(action(p, m, 0.0), std::invalid_argument);
    Path two;
    two.times = {0.0, 1.0};
    two.states = Mat::Zero(2, 2);
    CHECK_THROWS_AS(action(two, m, 0.0), std::invalid_argument);
}

TEST_CASE("gradient lower bound") {
    const auto m = builtin_double_well();
    CHECK(gradient_lower_bound(m, v2(-1, 0), v2(0, 0)) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(gradient_lower_bound(m, v2(0.3, 0.4), v2(0.3, 0.4)) == 0.0);
    CHECK(gradient_lower_bound(m, v2(-1, 0), v2(1, 0)) == doctest::Approx(0.0).epsilon(1e-15));

    VectorFieldModel no_pot = m;
    no_pot.potential = nullptr;
    CHECK_THROWS_AS(gradient_lower_bound(no_pot, v2(-1, 0), v2(0, 0)), UnsupportedModelError);
}

TEST_CASE("action excess") {
    const auto m = builtin_double_well();
    CHECK(std::abs(action_excess(reversed_het_path(20, 2001), m, 0.0)) <= 1e-4);
    CHECK_THROWS_AS(action_excess(reversed_het_path(20, 101), m, 0.05), UnsupportedModelError);

    // excess is a square integral up to quadrature error
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-1.2, 1.2);
    for (int rep = 0; rep < 10; ++rep) {
        Path p;
        p.times.resize(101);
        p.states = Mat(101, 2);
        const Vec a = v2(u(rng), u(rng)), b = v2(u(rng), u(rng));
        for (int i = 0; i <= 100; ++i) {
            const double s = static_cast<double>(i) / 100;
            p.times[static_cast<std::size_t>(i)] = s;
            p.states.row(i) = ((1 - s) * a + s * b).transpose();
        }
        CHECK(action_excess(p, m, 0.0) >= -1e-6);
    }
}

TEST_CASE("action is not reparameterization invariant") {
    const auto m = builtin_double_well();
    const double base = action(reversed_het_path(20, 2001), m, 0.0).value;

    // the same curve traversed at twice the speed
    Path fast;
    fast.times.resize(2001);
    fast.states = Mat(2001, 2);
    for (int i = 0; i <= 2000; ++i) {
        const double t = -10.0 + 10.0 * i / 1000.0;
        fast.times[static_cast<std::size_t>(i)] = t;
        fast.states.row(i) = double_well_heteroclinic(-2.0 * t).transpose();
    }
    const double doubled = action(fast, m, 0.0).value;
    CHECK(doubled == doctest::Approx(0.5625).epsilon(1e-3));
    CHECK(doubled > base + 0.05);
}

TEST_CASE("quadrature converges at order >= 2 toward 0.5") {
    const auto m = builtin_double_well();
    const double e1 = std::abs(action(reversed_het_path(20, 501), m, 0.0).value - 0.5);
    const double e2 = std::abs(action(reversed_het_path(20, 1001), m, 0.0).value - 0.5);
    const double e3 = std::abs(action(reversed_het_path(20, 2001), m, 0.0).value - 0.5);
    CHECK(e1 / e2 >= 3.0);
    CHECK(e2 / e3 >= 3.0);
}

TEST_CASE("no smooth endpoint-fixed perturbation lowers the action") {
    const auto m = builtin_double_well();
    const Path base = reversed_het_path(20, 2001);
    const double base_action = action(base, m, 0.0).value;

    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> coeff(-1.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        Path p = base;
        double amps[2][3];
        for (auto& row : amps)
            for (double& a : row) a = coeff(rng);
        for (std::size_t i = 0; i < p.size(); ++i) {
            const double s = (p.times[i] + 20.0) / 40.0;  // in [0,1], 0 at both ends
            for (int comp = 0; comp < 2; ++comp) {
                double d = 0.0;
                for (int k = 1; k <= 3; ++k)
                    d += amps[comp][k - 1] * std::sin(k * M_PI * s);
                p.states(static_cast<Eigen::Index>(i), comp) += 0.05 / 3.0 * d;
            }
        }
        CHECK(action(p, m, 0.0).value >= base_action - 1e-6);
    }
}

TEST_CASE("nonuniform grids fall back to trapezoid") {
    const auto m = builtin_double_well();
    Path p;
    p.times = {0.0, 0.1, 0.3, 0.6, 1.0};
    p.states = Mat::Zero(5, 2);
    for (int i = 0; i < 5; ++i) p.states.row(i) = v2(-1 + p.times[static_cast<std::size_t>(i)], 0).transpose();
    CHECK(action(p, m, 0.0).quadrature == QuadratureRule::Trapezoid);
}

TEST_CASE("tail bound scales quadratically with the endpoint distance") {
    Equilibrium eq;
    eq.location = v2(-1, 0);
    eq.jacobian = Mat::Zero(2, 2);
    eq.jacobian(0, 0) = -2;
    eq.jacobian(1, 1) = -1;
    eq.eigenvalues = Eigen::VectorXcd(2);
    eq.eigenvalues << std::complex<double>(-2, 0), std::complex<double>(-1, 0);
    const double b1 = action_tail_bound(eq, 1e-3);
    const double b2 = action_tail_bound(eq, 2e-3);
    CHECK(b1 > 0.0);
    CHECK(b2 / b1 == doctest::Approx(4.0));
    CHECK(b1 == doctest::Approx(4.0 * 1e-6 / 1.0));
}
