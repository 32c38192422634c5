#ifndef MPEP_EULER_LAGRANGE_HPP
#define MPEP_EULER_LAGRANGE_HPP

#include <utility>

#include "mpep/model.hpp"

namespace mpep {

/// The first-order systems whose heteroclinic orbits are candidate escape
/// paths, in two coordinate charts:
///
///  W form (momentum chart), F = f + mu*g the full drift:
///      u' = F(u) + w
///      w' = -DF(u)^T w,            H(u,w) = |w|^2/2 + <F(u), w>
///
///  V form, v = w + 2 F(u):
///      u' = -F(u) + v
///      v' = Df(u)^T v + mu [ 2(Dg^T - Dg)(f + mu g) + (2 Dg - Dg^T) v ]
///                                  C(u,v) = |v|^2/2 - <F(u), v>
///
/// For symmetric Df both charts carry the same conserved quantity
/// (C = H composed with the coordinate map) and {v = 0} contains the
/// time-reversed flow.
enum class ElForm { WForm, VForm };

struct ElSystem {
    VectorFieldModel model;
    double mu = 0.0;
    ElForm form = ElForm::VForm;

    int dim() const { return 2 * model.n; }
    Vec rhs(const Vec& z) const;

    /// Jacobian of rhs. The curvature terms (derivatives of the Jacobian
    /// maps) are formed by central differences of f_jac/g_jac, accurate to
    /// ~1e-10; everything else is analytic.
    Mat rhs_jac(const Vec& z) const;

    /// H (W form) or C (V form).
    double invariant(const Vec& z) const;
    Vec invariant_gradient(const Vec& z) const;
};

ElSystem assemble_w_form(const VectorFieldModel& model, double mu);
ElSystem assemble_v_form(const VectorFieldModel& model, double mu);

double hamiltonian_w(const VectorFieldModel& model, double mu, const Vec& u, const Vec& w);
double conserved_c(const VectorFieldModel& model, double mu, const Vec& u, const Vec& v);

/// v = w + 2 (f + mu g)(u); exact inverse pair.
std::pair<Vec, Vec> to_v_coords(const VectorFieldModel& model, double mu, const Vec& u, const Vec& w);
std::pair<Vec, Vec> to_w_coords(const VectorFieldModel& model, double mu, const Vec& u, const Vec& v);

/// d/du [ A(u)^T c ] (or A(u) c without transpose) for a Jacobian-valued map
/// A, by central differences; column k is the derivative in direction e_k.
Mat matvec_jacobian_fd(const std::function<Mat(const Vec&)>& A, const Vec& u,
                       const Vec& c, bool transpose, double step = 1e-6);

}  // namespace mpep

#endif
