#include "mpep/melnikov.hpp"

#include <cmath>

#include "mpep/errors.hpp"

namespace mpep {

namespace {

// Variational coefficient of the reversed flow along the base orbit.
Mat flow_coefficient(const VectorFieldModel& model, const HeteroclinicSolution& base, double t) {
    return -model.f_jac(base.eval(t));
}

// Coefficient of the coupled correction system,
//   [ -Df(y0)   I        ]
//   [  0        Df(y0)^T ].
Mat coupled_coefficient(const VectorFieldModel& model, const HeteroclinicSolution& base, double t) {
    const int n = model.n;
    const Mat Df = model.f_jac(base.eval(t));
    Mat A = Mat::Zero(2 * n, 2 * n);
    A.topLeftCorner(n, n) = -Df;
    A.topRightCorner(n, n) = Mat::Identity(n, n);
    A.bottomRightCorner(n, n) = Df.transpose();
    return A;
}

Vec forcing_at(const VectorFieldModel& model, const Vec& y) {
    const Mat Dg = model.g_jac(y);
    return 2.0 * (Dg.transpose() - Dg) * model.f(y);
}

std::vector<BoundaryRow> decay_rows(const Mat& left_limit, const Mat& right_limit) {
    std::vector<BoundaryRow> rows;
    const SpectralSplit sl = split_spectrum(left_limit);
    const Mat cl = orthonormal_complement(sl.unstable_basis);
    for (int c = 0; c < cl.cols(); ++c)
        rows.push_back({BoundaryRow::End::Left, cl.col(c), 0.0});
    const SpectralSplit sr = split_spectrum(right_limit);
    const Mat cr = orthonormal_complement(sr.stable_basis);
    for (int c = 0; c < cr.cols(); ++c)
        rows.push_back({BoundaryRow::End::Right, cr.col(c), 0.0});
    return rows;
}

// L2 row killing the translation-mode component of the first n state
// components against the base orbit derivative.
MeshRow translation_normalization(const HeteroclinicSolution& base, int total_dim, int n,
                                  int n_params) {
    const std::vector<double>& tmesh = base.path.times;
    const std::vector<double> w = trapezoid_weights(tmesh);
    MeshRow row;
    row.weights = Mat::Zero(static_cast<Eigen::Index>(tmesh.size()), total_dim);
    if (n_params > 0) row.param_weights = Vec::Zero(n_params);
    for (std::size_t i = 0; i < tmesh.size(); ++i)
        row.weights.row(static_cast<Eigen::Index>(i)).head(n) =
            w[i] * base.rep.eval_derivative(tmesh[i]).transpose();
    row.value = 0.0;
    return row;
}

Path path_from_states(const std::vector<double>& times, Mat states) {
    return Path(times, std::move(states));
}

}  // namespace

Path antisymmetric_forcing(const VectorFieldModel& model, const Path& base) {
    Path out;
    out.times = base.times;
    out.states = Mat(base.states.rows(), model.n);
    for (std::size_t i = 0; i < base.size(); ++i)
        out.states.row(static_cast<Eigen::Index>(i)) = forcing_at(model, base.state(i)).transpose();
    return out;
}

double forcing_orthogonality(const VectorFieldModel& model, const Path& base,
                             const Path& forcing, double* l2_out) {
    if (base.size() != forcing.size())
        throw std::invalid_argument("forcing_orthogonality: grids do not match");
    const std::vector<double> w = trapezoid_weights(base.times);
    double max_pointwise = 0.0, l2 = 0.0;
    for (std::size_t i = 0; i < base.size(); ++i) {
        const double pair = model.f(base.state(i)).dot(forcing.state(i));
        max_pointwise = std::max(max_pointwise, std::abs(pair));
        l2 += w[i] * pair;
    }
    if (l2_out) *l2_out = std::abs(l2);
    return max_pointwise;
}

Path first_order_flow_correction(const VectorFieldModel& model,
                                 const HeteroclinicSolution& base) {
    const int n = model.n;
    CollocationSystem sys;
    sys.dim = n;
    sys.rhs = [&model, &base](double t, const Vec& z, const Vec&) {
        const Vec y = base.eval(t);
        return Vec(-model.f_jac(y) * z - model.g(y));
    };
    sys.jac_z = [&model, &base](double t, const Vec&, const Vec&) {
        return flow_coefficient(model, base, t);
    };

    auto rows = decay_rows(-model.f_jac(base.from_eq.location),
                           -model.f_jac(base.to_eq.location));
    std::vector<MeshRow> mrows{
        translation_normalization(base, n, n, /*n_params=*/0)};

    CollocationResult res = solve_collocation(
        sys, base.path.times, Mat::Zero(static_cast<Eigen::Index>(base.path.size()), n), Vec(),
        rows, mrows, {});
    return path_from_states(base.path.times, std::move(res.states));
}

namespace {

CollocationResult escape_correction_rep(const VectorFieldModel& model,
                                        const HeteroclinicSolution& base) {
    const int n = model.n;
    CollocationSystem sys;
    sys.dim = 2 * n;
    sys.n_params = 1;
    sys.rhs = [&model, &base, n](double t, const Vec& z, const Vec& p) {
        const Vec y = base.eval(t);
        const Mat Df = model.f_jac(y);
        const Vec f = model.f(y);
        Vec out(2 * n);
        out.head(n) = -Df * z.head(n) + z.tail(n) - model.g(y);
        out.tail(n) = Df.transpose() * z.tail(n) + forcing_at(model, y) + p(0) * f;
        return out;
    };
    sys.jac_z = [&model, &base](double t, const Vec&, const Vec&) {
        return coupled_coefficient(model, base, t);
    };
    sys.jac_p = [&model, &base, n](double t, const Vec&, const Vec&) {
        Mat col = Mat::Zero(2 * n, 1);
        col.col(0).tail(n) = model.f(base.eval(t));
        return col;
    };

    Mat left = Mat::Zero(2 * n, 2 * n), right = left;
    const Mat Dfa = model.f_jac(base.from_eq.location);
    const Mat Dfb = model.f_jac(base.to_eq.location);
    left.topLeftCorner(n, n) = -Dfa;
    left.topRightCorner(n, n) = Mat::Identity(n, n);
    left.bottomRightCorner(n, n) = Dfa.transpose();
    right.topLeftCorner(n, n) = -Dfb;
    right.topRightCorner(n, n) = Mat::Identity(n, n);
    right.bottomRightCorner(n, n) = Dfb.transpose();

    auto rows = decay_rows(left, right);
    std::vector<MeshRow> mrows{translation_normalization(base, 2 * n, n, /*n_params=*/1)};

    CollocationResult res = solve_collocation(
        sys, base.path.times, Mat::Zero(static_cast<Eigen::Index>(base.path.size()), 2 * n),
        Vec::Zero(1), rows, mrows, {});
    if (std::isfinite(res.condition_estimate) && res.condition_estimate > 1e10)
        throw NearTangencyError(
            "escape correction: bordered variational system nearly singular (condition " +
            std::to_string(res.condition_estimate) + "); base connection suspect");
    return res;
}

}  // namespace

std::pair<Path, Path> first_order_escape_correction(const VectorFieldModel& model,
                                                    const HeteroclinicSolution& base,
                                                    double* rho_out) {
    const int n = model.n;
    CollocationResult res = escape_correction_rep(model, base);
    if (rho_out) *rho_out = res.params(0);
    Path u1 = path_from_states(base.path.times, Mat(res.states.leftCols(n)));
    Path v1 = path_from_states(base.path.times, Mat(res.states.rightCols(n)));
    return {std::move(u1), std::move(v1)};
}

Path correction_displacement(const Path& u1, const Path& y1) {
    if (u1.size() != y1.size() || u1.dim() != y1.dim())
        throw std::invalid_argument("correction_displacement: grids do not match");
    Path d;
    d.times = u1.times;
    d.states = u1.states - y1.states;
    return d;
}

CorrectionBundle compute_corrections(const VectorFieldModel& model,
                                     const HeteroclinicSolution& base) {
    CorrectionBundle b;
    b.base = base.path;
    Path forcing = antisymmetric_forcing(model, base.path);
    b.forcing_sup_norm = sup_row_norm(forcing);
    b.solvability_residual = forcing_orthogonality(model, base.path, forcing, &b.solvability_l2);
    if (b.solvability_residual > 1e-8)
        throw NearTangencyError("corrections: pointwise solvability residual " +
                                std::to_string(b.solvability_residual) + " above 1e-8");
    b.flow_correction = first_order_flow_correction(model, base);

    const int n = model.n;
    CollocationResult rep = escape_correction_rep(model, base);
    b.cokernel_multiplier = rep.params(0);
    b.path_correction = path_from_states(base.path.times, Mat(rep.states.leftCols(n)));
    b.costate_correction = path_from_states(base.path.times, Mat(rep.states.rightCols(n)));
    b.displacement = correction_displacement(b.path_correction, b.flow_correction);
    b.displacement_sup_norm = sup_row_norm(b.displacement);

    // defect of the costate equation at the collocation nodes
    const auto nodes = gauss_nodes();
    double defect = 0.0;
    for (std::size_t i = 0; i + 1 < rep.tmesh.size(); ++i) {
        const double h = rep.tmesh[i + 1] - rep.tmesh[i];
        for (double c : nodes) {
            const double t = rep.tmesh[i] + c * h;
            const Vec y = base.eval(t);
            const Vec v = rep.eval(t).tail(n);
            const Vec vdot = rep.eval_derivative(t).tail(n);
            defect = std::max(defect, (vdot - model.f_jac(y).transpose() * v - forcing_at(model, y))
                                          .lpNorm<Eigen::Infinity>());
        }
    }
    b.costate_ode_residual = defect;
    return b;
}

double finite_difference_cross_check(const VectorFieldModel& model,
                                     const HeteroclinicSolution& base_reversed,
                                     const HeteroclinicSolution& base_el,
                                     const CorrectionBundle& bundle, double mu_step,
                                     const BvpConfig& cfg) {
    const int n = model.n;

    SystemFamily rev_family{
        [model](double m) { return reversed_drift_system(model, m); }};
    const HeteroclinicSolution rev_mu =
        continue_in_mu(rev_family, base_reversed, {mu_step}, cfg).front();
    Path quot_y;
    quot_y.times = base_reversed.path.times;
    quot_y.states = (rev_mu.path.states - base_reversed.path.states) / mu_step;
    const double err_y = linf_distance(quot_y, bundle.flow_correction);

    SystemFamily el_family{
        [model](double m) { return as_autonomous(assemble_v_form(model, m)); }};
    const HeteroclinicSolution el_mu = continue_in_mu(el_family, base_el, {mu_step}, cfg).front();
    Mat quot = (el_mu.path.states - base_el.path.states) / mu_step;
    Mat pred(quot.rows(), 2 * n);
    pred.leftCols(n) = bundle.path_correction.states;
    pred.rightCols(n) = bundle.costate_correction.states;
    const double err_uv = (quot - pred).cwiseAbs().maxCoeff();

    return std::max(err_y, err_uv);
}

}  // namespace mpep
