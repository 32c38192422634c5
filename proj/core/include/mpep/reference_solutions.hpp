#ifndef MPEP_REFERENCE_SOLUTIONS_HPP
#define MPEP_REFERENCE_SOLUTIONS_HPP

#include <Eigen/Dense>

namespace mpep {

/// Closed-form reference solutions for the built-in double-well model,
/// used as oracles by the tests and the acceptance suite.

/// Saddle-to-attractor connection of x' = f(x) + mu g(x) (mu-independent):
///   h(t) = ( -1/sqrt(exp(-2t) + 1), 0 ),  h(-inf) = (0,0), h(inf) = (-1,0).
Eigen::Vector2d double_well_heteroclinic(double t);

/// First-order escape-path correction along y0(t) = h(-t):
///   u1(t) = ( 0, -e^t + sqrt(e^{2t}+1) - e^{-t} asinh(e^t) ).
/// Direct evaluation cancels catastrophically for t >~ 6 (the value decays
/// like e^{-t} t while the summands grow like e^t), so the tail switches to
/// the expansion e^{-t}(1/2 - t - ln 2) - (3/8) e^{-3t}; both branches agree
/// to ~1e-13 absolute in the crossover window.
Eigen::Vector2d double_well_escape_correction(double t);

/// Costate of the same solution: v1(t) = (0, 2 e^{-t} asinh(e^t) - 2/sqrt(e^{2t}+1)).
Eigen::Vector2d double_well_costate_correction(double t);

}  // namespace mpep

#endif
