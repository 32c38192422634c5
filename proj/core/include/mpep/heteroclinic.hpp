#ifndef MPEP_HETEROCLINIC_HPP
#define MPEP_HETEROCLINIC_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mpep/collocation.hpp"
#include "mpep/equilibrium.hpp"
#include "mpep/euler_lagrange.hpp"
#include "mpep/model.hpp"

namespace mpep {

/// Autonomous system handed to the connecting-orbit solver. When the flow
/// has a first integral (the Euler-Lagrange systems), `invariant_gradient`
/// must be provided: the stable/unstable manifolds of the end equilibria
/// then both lie inside one level set, the projection boundary conditions
/// over-determine the problem by one row, and the solver compensates with a
/// scalar unfolding term  z' = F(z) + lambda * grad(invariant)(z)  whose
/// converged multiplier is reported (and is zero up to the residual
/// tolerance on a genuine connection).
struct AutonomousSystem {
    int dim = 0;
    std::function<Vec(const Vec&)> rhs;
    std::function<Mat(const Vec&)> jac;
    std::function<Vec(const Vec&)> invariant_gradient;  // optional
};

AutonomousSystem forward_drift_system(const VectorFieldModel& model, double mu);
AutonomousSystem reversed_drift_system(const VectorFieldModel& model, double mu);
AutonomousSystem as_autonomous(const ElSystem& el);

struct BvpConfig {
    double T = 20.0;          // half-length of the truncation interval
    int mesh = 400;           // number of mesh intervals
    double newton_tol = 1e-10;
    double bc_offset = 1e-4;  // shooting offset along the unstable direction
    int max_newton = 25;

    double endpoint_tol = 1e-6;  // required closeness to the equilibria
    double T_max = 80.0;         // T doubles until endpoint_tol holds
    double hyperbolicity_tol = 1e-6;
};

/// One scalar condition removing the time-translation degeneracy.
struct PhaseCondition {
    enum class Kind { CoordinateAnchor, IntegralAgainstReference };
    Kind kind = Kind::CoordinateAnchor;

    // CoordinateAnchor: state coordinate `coord` at the middle mesh point
    // equals `value`.
    int coord = 0;
    double value = 0.0;

    // IntegralAgainstReference: <z_ref', z - z_ref>_{L2} = 0 with the
    // derivative taken through the system rhs along the reference.
    Path reference;

    static PhaseCondition anchor(int coord, double value);
    static PhaseCondition integral(Path reference);
    std::string describe() const;
};

struct HeteroclinicSolution {
    Path path;  // mesh-point states on [-T, T]
    double T = 0.0;
    Equilibrium from_eq, to_eq;
    double mu = 0.0;
    double residual_norm = 0.0;
    int newton_iters = 0;
    std::vector<double> mesh;  // same as path.times
    std::string phase_anchor;
    double unfolding = 0.0;  // conserved-quantity unfolding multiplier
    double condition_estimate = std::numeric_limits<double>::quiet_NaN();
    bool near_tangency = false;  // condition estimate above 1e12

    CollocationResult rep;  // dense representation (stages)
    Vec eval(double t) const { return rep.eval(t); }
    Path resample(int n_points) const;
    int dim() const { return path.dim(); }
};

/// Connecting orbit from `from_eq` (leaving along its unstable subspace) to
/// `to_eq` (arriving along its stable subspace) through projection boundary
/// conditions on [-T, T], one phase condition, and - for systems with an
/// invariant - the unfolding term. `mu_label` is stored on the result.
HeteroclinicSolution solve_heteroclinic(const AutonomousSystem& sys,
                                        const Equilibrium& from_eq,
                                        const Equilibrium& to_eq,
                                        const BvpConfig& cfg,
                                        const Path& initial_guess,
                                        const PhaseCondition& phase,
                                        double mu_label = 0.0);

/// A mu-indexed family of systems plus the equilibrium tracking needed to
/// re-derive boundary conditions during continuation.
struct SystemFamily {
    std::function<AutonomousSystem(double mu)> system;
};

/// Natural-parameter continuation: walks from base.mu towards each target
/// in turn, re-refining both equilibria at every accepted mu, warm-starting
/// Newton from the previous solution and halving the step on failure
/// (minimum step 1e-8, else ContinuationStuckError). Returns one converged
/// solution per target.
std::vector<HeteroclinicSolution> continue_in_mu(const SystemFamily& family,
                                                 const HeteroclinicSolution& base,
                                                 const std::vector<double>& mu_targets,
                                                 const BvpConfig& cfg);

/// Shooting-based cold start for the deterministic connection: integrates
/// the forward flow out of the saddle along its one-dimensional unstable
/// manifold (offset cfg.bc_offset) until it settles at the attractor, and
/// maps the samples onto the collocation mesh. `reversed` flips time to
/// seed the attractor-to-saddle orbit of the reversed flow.
Path heteroclinic_guess(const VectorFieldModel& model, double mu, const BvpConfig& cfg,
                        const Equilibrium& saddle, const Equilibrium& attractor,
                        bool reversed);

/// Deterministic reversed-flow connection attractor -> saddle at the given
/// mu (continuation from mu = 0 when mu != 0).
HeteroclinicSolution solve_reversed_heteroclinic(const VectorFieldModel& model, double mu,
                                                 const BvpConfig& cfg,
                                                 const Vec& attractor_guess,
                                                 const Vec& saddle_guess);

/// Deterministic forward-flow connection saddle -> attractor.
HeteroclinicSolution solve_forward_heteroclinic(const VectorFieldModel& model, double mu,
                                                const BvpConfig& cfg,
                                                const Vec& saddle_guess,
                                                const Vec& attractor_guess);

struct MpepResult {
    HeteroclinicSolution reversed_het;  // deterministic connection at mu
    HeteroclinicSolution el_solution;   // V-form connection (a,0) -> (b,0), dim 2n
    Path escape_path;                   // u component of el_solution
};

/// Full pipeline: symmetry screen, equilibria of the V-form system, mu = 0
/// seed from the deterministic connection, continuation to the requested mu.
MpepResult most_probable_escape_path(const VectorFieldModel& model, double mu,
                                     const BvpConfig& cfg,
                                     const Vec& attractor_guess,
                                     const Vec& saddle_guess);

}  // namespace mpep

#endif
