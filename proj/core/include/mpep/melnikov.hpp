#ifndef MPEP_MELNIKOV_HPP
#define MPEP_MELNIKOV_HPP

#include <utility>

#include "mpep/heteroclinic.hpp"

namespace mpep {

/// First-order (in mu) corrections along the unperturbed reversed-flow
/// heteroclinic y0, computed as linear collocation boundary-value problems
/// on the base mesh with spectral-projection boundary conditions at the
/// truncated ends. Both corrections are normalized against the
/// translation mode y0' (zero L2 component), which is exactly the
/// normalization the integral phase condition imposes on the continuation
/// solutions, so finite differences in mu are directly comparable.
///
///   flow correction   y1:  y1' = -Df(y0) y1 - g(y0)
///   escape correction (u1, v1):
///                     u1' = -Df(y0) u1 + v1 - g(y0)
///                     v1' =  Df(y0)^T v1 + forcing,
///   forcing           g1 = 2 (Dg(y0)^T - Dg(y0)) f(y0)
///
/// The coupled problem is solved in bordered form: the one-dimensional
/// cokernel direction (0, f(y0)) enters with a scalar multiplier whose
/// converged value doubles as a solvability diagnostic.
struct CorrectionBundle {
    Path base;                // y0 on the mesh
    Path flow_correction;     // y1
    Path path_correction;     // u1
    Path costate_correction;  // v1
    Path displacement;        // u1 - y1, pointwise
    double displacement_sup_norm = 0.0;
    double forcing_sup_norm = 0.0;         // sup_t |g1(t)|
    double solvability_residual = 0.0;     // max_t |<f(y0), g1>|
    double solvability_l2 = 0.0;           // |<f(y0), g1>_{L2}|
    double cokernel_multiplier = 0.0;      // bordered multiplier
    double costate_ode_residual = 0.0;     // defect of v1' = Df(y0)^T v1 + g1
                                           // at the collocation nodes
};

/// g1 along the base path (factor-2 convention, see model.hpp).
Path antisymmetric_forcing(const VectorFieldModel& model, const Path& base);

/// Pointwise and L2 pairings of f(y0) with the forcing; returns the
/// pointwise max, stores the |L2| pairing in l2_out when non-null.
double forcing_orthogonality(const VectorFieldModel& model, const Path& base,
                             const Path& forcing, double* l2_out = nullptr);

/// Unique bounded solution of the flow variational problem, normalized
/// against the translation mode.
Path first_order_flow_correction(const VectorFieldModel& model,
                                 const HeteroclinicSolution& base);

/// Unique bounded solution pair (u1, v1) of the coupled variational
/// problem; bordered multiplier written to rho_out when non-null.
/// Throws NearTangencyError when the bordered system is badly conditioned.
std::pair<Path, Path> first_order_escape_correction(const VectorFieldModel& model,
                                                    const HeteroclinicSolution& base,
                                                    double* rho_out = nullptr);

/// delta1 = u1 - y1 on the common mesh.
Path correction_displacement(const Path& u1, const Path& y1);

/// Everything above in one pass along a converged mu = 0 base solution.
CorrectionBundle compute_corrections(const VectorFieldModel& model,
                                     const HeteroclinicSolution& base);

/// L_inf distance between (solution(mu) - solution(0))/mu from the
/// continuation solver and the assembled first-order prediction; the
/// convention-free cross-check of the corrections. Uses the reversed-flow
/// family for y1 and the V-form family for (u1, v1), returns the larger
/// of the two errors.
double finite_difference_cross_check(const VectorFieldModel& model,
                                     const HeteroclinicSolution& base_reversed,
                                     const HeteroclinicSolution& base_el,
                                     const CorrectionBundle& bundle,
                                     double mu_step, const BvpConfig& cfg);

}  // namespace mpep

#endif
