#ifndef MPEP_ERRORS_HPP
#define MPEP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace mpep {

// Model violates a structural requirement (missing potential, asymmetric
// base Jacobian, dimension mismatch).
class UnsupportedModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Newton failed to locate an equilibrium from the given guess.
class NoEquilibriumError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// An equilibrium has an eigenvalue too close to the imaginary axis.
class NonHyperbolicError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Boundary-condition/unknown count mismatch in a boundary-value problem.
class IllPosedProblemError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Collocation Newton iteration diverged.
class NoConnectionError : public std::runtime_error {
public:
    NoConnectionError(const std::string& what, double last_residual)
        : std::runtime_error(what), last_residual(last_residual) {}
    double last_residual;
};

// Parameter continuation could not reduce the step any further.
class ContinuationStuckError : public std::runtime_error {
public:
    ContinuationStuckError(const std::string& what, double last_good_mu)
        : std::runtime_error(what), last_good_mu(last_good_mu) {}
    double last_good_mu;
};

// A linear solve is so badly conditioned that the transversality premise
// of the correction problem is suspect.
class NearTangencyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Statistics requested from an ensemble without enough exits.
class InsufficientDataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Config file rejected (unknown key, bad value, missing file).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace mpep

#endif
