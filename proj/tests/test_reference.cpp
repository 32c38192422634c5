#include <doctest.h>

#include <cmath>

#include "mpep/reference_solutions.hpp"

using namespace mpep;

// pins computed with 30-digit arithmetic from the defining formulas

TEST_CASE("heteroclinic closed form") {
    CHECK(double_well_heteroclinic(0.0)(0) == doctest::Approx(-1.0 / std::sqrt(2.0)).epsilon(1e-16));
    CHECK(double_well_heteroclinic(0.0)(1) == 0.0);
    CHECK(double_well_heteroclinic(-1.0)(0) == doctest::Approx(-0.34525776171161968).epsilon(1e-15));
    CHECK(double_well_heteroclinic(50.0)(0) == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(std::abs(double_well_heteroclinic(-40.0)(0)) <= 1e-17);
    CHECK(double_well_heteroclinic(-400.0)(0) == 0.0);
}

TEST_CASE("escape correction closed form") {
    struct Pin {
        double t, u, v;
    };
    const Pin pins[] = {
        {-3.0, -0.048135794130057137, 0.0016488230643070543},
        {-1.0, -0.28107471522179363, 0.080417012977849896},
        {0.0, -0.46716002464644798, 0.348533611665991},
        {1.0, -0.4566278684265799, 0.57895001969184638},
        {2.5, -0.22127380923778047, 0.36087511762030513},
        {5.9999, -0.015352570071627426, 0.028226151504830208},
        {6.0001, -0.015349995563222551, 0.028221498231603183},  // tail branch
        {8.0, -0.0027484946981394488, 0.0051615267966898922},
        {12.0, -7.4917285532832429e-5, 0.00014369035871251061},
    };
    for (const auto& p : pins) {
        CHECK(double_well_escape_correction(p.t)(0) == 0.0);
        CHECK(double_well_escape_correction(p.t)(1) == doctest::Approx(p.u).epsilon(1e-12));
        CHECK(double_well_costate_correction(p.t)(1) == doctest::Approx(p.v).epsilon(1e-12));
    }
}

TEST_CASE("escape correction tails vanish") {
    for (double t : {-60.0, -400.0, 60.0, 400.0}) {
        CHECK(std::abs(double_well_escape_correction(t)(1)) <= 1e-12);
        CHECK(std::abs(double_well_costate_correction(t)(1)) <= 1e-12);
    }
}

TEST_CASE("the correction extremum sits near t = 0.44") {
    // sup |u1_2| = 0.49392..., attained at t ~ 0.4425 rather than at t = 0
    double best = 0.0, arg = 0.0;
    for (double t = -2.0; t <= 3.0; t += 1e-4) {
        const double v = std::abs(double_well_escape_correction(t)(1));
        if (v > best) {
            best = v;
            arg = t;
        }
    }
    CHECK(best == doctest::Approx(0.49392033548443242).epsilon(1e-7));
    CHECK(arg == doctest::Approx(0.4425).epsilon(2e-3));
    CHECK(best > std::abs(double_well_escape_correction(0.0)(1)));
}
