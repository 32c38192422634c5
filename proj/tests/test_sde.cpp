#include <doctest.h>

#include <cmath>

#include "mpep/errors.hpp"
#include "mpep/reference_solutions.hpp"
#include "mpep/sde.hpp"

using namespace mpep;

namespace {

Vec v2(double a, double b) {
    Vec x(2);
    x << a, b;
    return x;
}

SimConfig escape_config(double eps, double mu, int n_paths, double t_max, std::uint64_t seed) {
    SimConfig cfg;
    cfg.eps = eps;
    cfg.mu = mu;
    cfg.dt = 1e-3;
    cfg.t_max = t_max;
    cfg.n_paths = n_paths;
    cfg.seed = seed;
    cfg.start = v2(-1, 0);
    cfg.exit_rule = ExitRule::hyperplane(v2(1, 0), 0.0);
    return cfg;
}

bool ensembles_identical(const EscapeEnsemble& a, const EscapeEnsemble& b) {
    if (a.exits.size() != b.exits.size() || a.n_no_exit != b.n_no_exit) return false;
    for (std::size_t i = 0; i < a.exits.size(); ++i) {
        const auto& x = a.exits[i];
        const auto& y = b.exits[i];
        if (x.path_id != y.path_id || x.exit_time != y.exit_time) return false;
        if (x.exit_location != y.exit_location) return false;
        if (x.escape_segment.times != y.escape_segment.times) return false;
        if (x.escape_segment.states != y.escape_segment.states) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("no noise, no exit") {
    const auto m = builtin_double_well();
    SimConfig cfg = escape_config(0.0, 0.0, 1, 10.0, 1);
    const auto ens = simulate(m, cfg);
    CHECK(ens.exits.empty());
    CHECK(ens.n_no_exit == 1);
}

TEST_CASE("determinism across thread counts and seeds") {
    const auto m = builtin_double_well();
    const SimConfig cfg = escape_config(0.45, 0.0, 60, 300.0, 42);
    const auto e1 = simulate(m, cfg, 1);
    const auto e8 = simulate(m, cfg, 8);
    CHECK(ensembles_identical(e1, e8));
    CHECK(!e1.exits.empty());

    SimConfig other = cfg;
    other.seed = 43;
    const auto e2 = simulate(m, other, 2);
    REQUIRE(!e2.exits.empty());
    CHECK(e1.exits.front().exit_time != e2.exits.front().exit_time);

    // same summary statistics within 3 standard errors
    const auto s1 = exit_statistics(e1);
    const auto s2 = exit_statistics(e2);
    const double se = s1.mean_exit_time / std::sqrt(static_cast<double>(s1.n_exits));
    CHECK(std::abs(s1.mean_exit_time - s2.mean_exit_time) <= 3.0 * se * std::sqrt(2.0));
}

TEST_CASE("exit locations satisfy the exit rule") {
    const auto m = builtin_double_well();
    const auto ens = simulate(m, escape_config(0.45, 0.0, 120, 300.0, 7), 2);
    REQUIRE(ens.exits.size() >= 100);
    const double slack = 3.0 * 0.45 * std::sqrt(1e-3);
    for (const auto& e : ens.exits) {
        CHECK(std::abs(e.exit_location(0)) <= slack);
        CHECK(e.exit_time <= 300.0);
        // the stored segment ends at the exit point
        CHECK((e.escape_segment.end() - e.exit_location).norm() == 0.0);
    }
}

TEST_CASE("exit statistics basics and scalings") {
    const auto m = builtin_double_well();
    const auto ens = simulate(m, escape_config(0.45, 0.0, 200, 500.0, 11), 2);
    const auto st = exit_statistics(ens);
    CHECK(st.n_exits >= 195);
    CHECK(st.mean_exit_time > 1.0);
    CHECK(st.mean_exit_time < 500.0);
    CHECK(st.median_exit_time < 2.5 * st.mean_exit_time);
    CHECK(st.eps_log_mean_time == doctest::Approx(0.45 * std::log(st.mean_exit_time)));
    CHECK(st.eps_sq_log_mean_time ==
          doctest::Approx(0.45 * 0.45 * std::log(st.mean_exit_time)));
    // exit-location spread along the separatrix is the OU stationary scale
    CHECK(std::sqrt(st.exit_location_cov(1, 1)) == doctest::Approx(0.45 / std::sqrt(2.0)).epsilon(0.25));
}

TEST_CASE("single-exit and empty ensembles") {
    EscapeEnsemble ens;
    ens.config = escape_config(0.3, 0.0, 1, 10.0, 1);
    CHECK_THROWS_AS(exit_statistics(ens), InsufficientDataError);

    EscapeEvent ev;
    ev.path_id = 0;
    ev.exit_time = 3.5;
    ev.exit_location = v2(0.0, 0.2);
    ens.exits.push_back(ev);
    const auto st = exit_statistics(ens);
    CHECK(st.mean_exit_time == 3.5);
    CHECK(st.median_exit_time == 3.5);
    CHECK(st.exit_location_mean == v2(0.0, 0.2));
    CHECK(st.exit_location_cov.norm() == 0.0);

    CHECK_THROWS_AS(empirical_mpep(ens, 51), InsufficientDataError);
}

TEST_CASE("exit-time scaling trends toward the quasipotential value") {
    const auto m = builtin_double_well();
    double prev = 1e9;
    for (double eps : {0.45, 0.40, 0.35}) {
        const auto st = exit_statistics(simulate(m, escape_config(eps, 0.0, 300, 2000.0, 5), 2));
        CHECK(st.n_exits == 300);
        const double v = st.eps_sq_log_mean_time;
        CHECK(v > 0.5);   // approaches 2(V(b) - V(a)) = 0.5 from above
        CHECK(v < prev);  // monotone in eps
        prev = v;
    }
    CHECK(prev < 0.75);
}

TEST_CASE("exit-location symmetry at mu = 0") {
    const auto m = builtin_double_well();
    const auto ens = simulate(m, escape_config(0.45, 0.0, 500, 300.0, 99), 2);
    REQUIRE(ens.exits.size() >= 450);
    int pos = 0;
    for (const auto& e : ens.exits)
        if (e.exit_location(1) > 0) ++pos;
    const double n = static_cast<double>(ens.exits.size());
    const double z = (pos - 0.5 * n) / std::sqrt(0.25 * n);
    CHECK(std::abs(z) < 2.576);  // two-sided sign test at the 1% level
}

TEST_CASE("dt robustness of the mean exit time") {
    const auto m = builtin_double_well();
    SimConfig c1 = escape_config(0.45, 0.0, 1200, 500.0, 314);
    c1.dt = 2e-3;
    SimConfig c2 = c1;
    c2.dt = 1e-3;
    const double m1 = exit_statistics(simulate(m, c1, 2)).mean_exit_time;
    const double m2 = exit_statistics(simulate(m, c2, 2)).mean_exit_time;
    CHECK(std::abs(m1 - m2) / m2 <= 0.10);
}

TEST_CASE("empirical mean escape path stays in a tube around the reversed connection") {
    const auto m = builtin_double_well();
    const auto ens = simulate(m, escape_config(0.40, 0.0, 300, 1500.0, 2024), 2);
    REQUIRE(ens.exits.size() >= 50);
    const Path mean_path = empirical_mpep(ens, 81);

    // tube membership: distance from each mean-path point to the curve
    std::vector<Vec> ref;
    for (double t = -14.0; t <= 14.0; t += 1e-3) ref.push_back(double_well_heteroclinic(-t));
    for (std::size_t i = 0; i < mean_path.size(); ++i) {
        double d = 1e9;
        for (const Vec& y : ref) d = std::min(d, (mean_path.state(i) - y).norm());
        CHECK(d <= 0.15);
    }
}

TEST_CASE("perturbed escape paths dip to negative x2 and mirror with the model") {
    const auto m = builtin_double_well();
    const auto ens = simulate(m, escape_config(0.40, 0.2, 300, 1500.0, 77), 2);
    REQUIRE(ens.exits.size() >= 50);
    const Path mean_path = empirical_mpep(ens, 81);
    int neg = 0, total = 0;
    for (std::size_t i = 0; i < mean_path.size(); ++i) {
        const double s = mean_path.times[i];
        if (s < 0.1 || s > 0.9) continue;
        ++total;
        if (mean_path.state(i)(1) < 0.0) ++neg;
    }
    CHECK(total > 0);
    CHECK(static_cast<double>(neg) / total >= 0.75);

    // mirrored perturbation g -> (x2, 0) flips the dip
    VectorFieldModel mm = m;
    mm.name = "double_well_mirrored_g";
    mm.g = [](const Vec& x) { return Vec(v2(x(1), 0.0)); };
    mm.g_jac = [](const Vec&) {
        Mat J = Mat::Zero(2, 2);
        J(0, 1) = 1.0;
        return J;
    };
    mm.drift_raw = [](const double* x, double mu, double* out) {
        out[0] = x[0] - x[0] * x[0] * x[0] + mu * x[1];
        out[1] = -x[1];
    };
    const auto ens_m = simulate(mm, escape_config(0.40, 0.2, 300, 1500.0, 77), 2);
    REQUIRE(ens_m.exits.size() >= 50);
    const Path mean_m = empirical_mpep(ens_m, 81);
    int pos = 0, total_m = 0;
    for (std::size_t i = 0; i < mean_m.size(); ++i) {
        const double s = mean_m.times[i];
        if (s < 0.1 || s > 0.9) continue;
        ++total_m;
        if (mean_m.state(i)(1) > 0.0) ++pos;
    }
    CHECK(static_cast<double>(pos) / total_m >= 0.75);
}

TEST_CASE("saddle-ball exit rule") {
    const auto m = builtin_double_well();
    SimConfig cfg = escape_config(0.45, 0.0, 40, 300.0, 23);
    cfg.exit_rule = ExitRule::saddle_ball(v2(0, 0), 0.1);
    const auto ens = simulate(m, cfg, 2);
    REQUIRE(!ens.exits.empty());
    for (const auto& e : ens.exits)
        CHECK((e.exit_location - v2(0, 0)).norm() <= 0.1 + 3.0 * 0.45 * std::sqrt(1e-3));
}

TEST_CASE("config validation") {
    const auto m = builtin_double_well();
    SimConfig cfg = escape_config(0.3, 0.0, 1, 10.0, 1);
    cfg.start = Vec::Zero(3);
    CHECK_THROWS_AS(simulate(m, cfg), std::invalid_argument);
    cfg = escape_config(0.3, 0.0, 1, 10.0, 1);
    cfg.dt = 20.0;
    CHECK_THROWS_AS(simulate(m, cfg), std::invalid_argument);
}
