#include "mpep/collocation.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>

#include "mpep/errors.hpp"

namespace mpep {

namespace {

constexpr int kStages = 3;

// 3-stage Gauss-Legendre tableau.
const double kSqrt15 = std::sqrt(15.0);
const double kNodes[kStages] = {0.5 - kSqrt15 / 10.0, 0.5, 0.5 + kSqrt15 / 10.0};
const double kA[kStages][kStages] = {
    {5.0 / 36.0, 2.0 / 9.0 - kSqrt15 / 15.0, 5.0 / 36.0 - kSqrt15 / 30.0},
    {5.0 / 36.0 + kSqrt15 / 24.0, 2.0 / 9.0, 5.0 / 36.0 - kSqrt15 / 24.0},
    {5.0 / 36.0 + kSqrt15 / 30.0, 2.0 / 9.0 + kSqrt15 / 15.0, 5.0 / 36.0},
};
const double kWeights[kStages] = {5.0 / 18.0, 4.0 / 9.0, 5.0 / 18.0};

// Lagrange basis l_j over the nodes and its antiderivative
// Lambda_j(theta) = int_0^theta l_j.
double lagrange_basis(int j, double s) {
    double v = 1.0;
    for (int k = 0; k < kStages; ++k)
        if (k != j) v *= (s - kNodes[k]) / (kNodes[j] - kNodes[k]);
    return v;
}

double lagrange_antiderivative(int j, double theta) {
    double ca = 0.0, cb = 0.0;
    bool first = true;
    for (int k = 0; k < kStages; ++k) {
        if (k == j) continue;
        (first ? ca : cb) = kNodes[k];
        first = false;
    }
    const double denom = (kNodes[j] - ca) * (kNodes[j] - cb);
    return (theta * theta * theta / 3.0 - (ca + cb) * theta * theta / 2.0 + ca * cb * theta) / denom;
}

using Sparse = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

struct Layout {
    int N;   // intervals
    int d;   // state dimension
    int np;  // parameters
    int n_unknowns() const { return (N + 1) * d + N * kStages * d + np; }
    int x(int i) const { return i * d; }
    int k(int i, int j) const { return (N + 1) * d + (i * kStages + j) * d; }
    int p() const { return (N + 1) * d + N * kStages * d; }
};

Vec assemble_residual(const CollocationSystem& sys, const Layout& lo,
                      const std::vector<double>& tmesh, const Vec& z,
                      const std::vector<BoundaryRow>& brows,
                      const std::vector<MeshRow>& mrows) {
    const int N = lo.N, d = lo.d;
    const Vec p = z.segment(lo.p(), lo.np);
    Vec F(lo.n_unknowns());
    int r = 0;
    for (int i = 0; i < N; ++i) {
        const double h = tmesh[i + 1] - tmesh[i];
        const Vec xi = z.segment(lo.x(i), d);
        for (int j = 0; j < kStages; ++j) {
            Vec Xij = xi;
            for (int l = 0; l < kStages; ++l) Xij += h * kA[j][l] * z.segment(lo.k(i, l), d);
            F.segment(r, d) = z.segment(lo.k(i, j), d) - sys.rhs(tmesh[i] + kNodes[j] * h, Xij, p);
            r += d;
        }
    }
    for (int i = 0; i < N; ++i) {
        const double h = tmesh[i + 1] - tmesh[i];
        Vec c = z.segment(lo.x(i + 1), d) - z.segment(lo.x(i), d);
        for (int j = 0; j < kStages; ++j) c -= h * kWeights[j] * z.segment(lo.k(i, j), d);
        F.segment(r, d) = c;
        r += d;
    }
    for (const auto& b : brows) {
        const int at = b.end == BoundaryRow::End::Left ? lo.x(0) : lo.x(N);
        F(r++) = b.coeffs.dot(z.segment(at, d)) - b.value;
    }
    for (const auto& m : mrows) {
        double acc = -m.value;
        for (int i = 0; i <= N; ++i) acc += m.weights.row(i).dot(z.segment(lo.x(i), d));
        if (m.param_weights.size()) acc += m.param_weights.dot(p);
        F(r++) = acc;
    }
    return F;
}

Sparse assemble_jacobian(const CollocationSystem& sys, const Layout& lo,
                         const std::vector<double>& tmesh, const Vec& z,
                         const std::vector<BoundaryRow>& brows,
                         const std::vector<MeshRow>& mrows) {
    const int N = lo.N, d = lo.d;
    const Vec p = z.segment(lo.p(), lo.np);
    std::vector<Triplet> trip;
    trip.reserve(static_cast<std::size_t>(N) * kStages * d * d * (kStages + 2) + 4 * (N + 2) * d);

    auto put = [&trip](int r0, int c0, const Mat& M) {
        for (int a = 0; a < M.rows(); ++a)
            for (int b = 0; b < M.cols(); ++b)
                if (M(a, b) != 0.0) trip.emplace_back(r0 + a, c0 + b, M(a, b));
    };

    int r = 0;
    const Mat I = Mat::Identity(d, d);
    for (int i = 0; i < N; ++i) {
        const double h = tmesh[i + 1] - tmesh[i];
        const Vec xi = z.segment(lo.x(i), d);
        for (int j = 0; j < kStages; ++j) {
            Vec Xij = xi;
            for (int l = 0; l < kStages; ++l) Xij += h * kA[j][l] * z.segment(lo.k(i, l), d);
            const double tij = tmesh[i] + kNodes[j] * h;
            const Mat J = sys.jac_z(tij, Xij, p);
            put(r, lo.x(i), -J);
            for (int l = 0; l < kStages; ++l) {
                Mat M = -h * kA[j][l] * J;
                if (l == j) M += I;
                put(r, lo.k(i, l), M);
            }
            if (lo.np > 0) put(r, lo.p(), -sys.jac_p(tij, Xij, p));
            r += d;
        }
    }
    for (int i = 0; i < N; ++i) {
        const double h = tmesh[i + 1] - tmesh[i];
        put(r, lo.x(i + 1), I);
        put(r, lo.x(i), -I);
        for (int j = 0; j < kStages; ++j) put(r, lo.k(i, j), -h * kWeights[j] * I);
        r += d;
    }
    for (const auto& b : brows) {
        const int at = b.end == BoundaryRow::End::Left ? lo.x(0) : lo.x(N);
        put(r, at, b.coeffs.transpose());
        ++r;
    }
    for (const auto& m : mrows) {
        for (int i = 0; i <= N; ++i) put(r, lo.x(i), m.weights.row(i));
        if (m.param_weights.size()) put(r, lo.p(), m.param_weights.transpose());
        ++r;
    }
    Sparse J(lo.n_unknowns(), lo.n_unknowns());
    J.setFromTriplets(trip.begin(), trip.end());
    return J;
}

// Two-norm condition estimate by power iteration on A^T A and (A^T A)^{-1}.
double estimate_condition(const Sparse& A) {
    Eigen::SparseLU<Sparse> lu, lut;
    lu.compute(A);
    if (lu.info() != Eigen::Success) return std::numeric_limits<double>::infinity();
    Sparse At = A.transpose();
    lut.compute(At);
    if (lut.info() != Eigen::Success) return std::numeric_limits<double>::infinity();

    const int n = static_cast<int>(A.rows());
    Vec v = Vec::LinSpaced(n, 1.0, 2.0).array().sin().matrix();
    v.normalize();
    double sigma_max = 0.0;
    for (int it = 0; it < 20; ++it) {
        Vec w = A * v;
        sigma_max = w.norm();
        v = A.transpose() * w;
        v.normalize();
    }
    Vec u = Vec::LinSpaced(n, 0.0, 1.0).array().cos().matrix();
    u.normalize();
    double inv_sq = 0.0;
    for (int it = 0; it < 20; ++it) {
        Vec s1 = lut.solve(u);
        Vec s2 = lu.solve(s1);
        inv_sq = s2.norm();
        u = s2 / inv_sq;
    }
    const double sigma_min = 1.0 / std::sqrt(inv_sq);
    return sigma_max / sigma_min;
}

}  // namespace

std::array<double, 3> gauss_nodes() {
    return {kNodes[0], kNodes[1], kNodes[2]};
}

std::vector<double> trapezoid_weights(const std::vector<double>& tmesh) {
    std::vector<double> w(tmesh.size(), 0.0);
    for (std::size_t i = 0; i + 1 < tmesh.size(); ++i) {
        const double h = tmesh[i + 1] - tmesh[i];
        w[i] += 0.5 * h;
        w[i + 1] += 0.5 * h;
    }
    return w;
}

Path CollocationResult::to_path() const {
    return Path(tmesh, states);
}

Vec CollocationResult::eval(double t) const {
    const int N = static_cast<int>(tmesh.size()) - 1;
    if (t <= tmesh.front()) return states.row(0).transpose();
    if (t >= tmesh.back()) return states.row(N).transpose();
    auto it = std::upper_bound(tmesh.begin(), tmesh.end(), t);
    const int i = static_cast<int>(it - tmesh.begin()) - 1;
    const double h = tmesh[i + 1] - tmesh[i];
    const double theta = (t - tmesh[i]) / h;
    Vec v = states.row(i).transpose();
    for (int j = 0; j < kStages; ++j)
        v += h * lagrange_antiderivative(j, theta) * stages[static_cast<std::size_t>(i)].row(j).transpose();
    return v;
}

Vec CollocationResult::eval_derivative(double t) const {
    const int N = static_cast<int>(tmesh.size()) - 1;
    t = std::clamp(t, tmesh.front(), tmesh.back());
    auto it = std::upper_bound(tmesh.begin(), tmesh.end(), t);
    int i = static_cast<int>(it - tmesh.begin()) - 1;
    i = std::clamp(i, 0, N - 1);
    const double h = tmesh[i + 1] - tmesh[i];
    const double theta = (t - tmesh[i]) / h;
    Vec v = Vec::Zero(states.cols());
    for (int j = 0; j < kStages; ++j)
        v += lagrange_basis(j, theta) * stages[static_cast<std::size_t>(i)].row(j).transpose();
    return v;
}

CollocationResult solve_collocation(const CollocationSystem& sys,
                                    const std::vector<double>& tmesh,
                                    const Mat& guess_states, const Vec& guess_params,
                                    const std::vector<BoundaryRow>& boundary_rows,
                                    const std::vector<MeshRow>& mesh_rows,
                                    const CollocationOptions& opts) {
    const int N = static_cast<int>(tmesh.size()) - 1;
    const int d = sys.dim;
    if (N < 2) throw std::invalid_argument("solve_collocation: need at least 2 intervals");
    if (guess_states.rows() != N + 1 || guess_states.cols() != d)
        throw std::invalid_argument("solve_collocation: guess size mismatch");
    const int n_rows = static_cast<int>(boundary_rows.size() + mesh_rows.size());
    if (n_rows != d + sys.n_params)
        throw IllPosedProblemError("collocation: " + std::to_string(n_rows) +
                                   " side conditions for dim " + std::to_string(d) + " + " +
                                   std::to_string(sys.n_params) + " parameters");
    if (sys.n_params > 0 && !sys.jac_p)
        throw IllPosedProblemError("collocation: parameters declared without jac_p");

    Layout lo{N, d, sys.n_params};
    Vec z = Vec::Zero(lo.n_unknowns());
    for (int i = 0; i <= N; ++i) z.segment(lo.x(i), d) = guess_states.row(i).transpose();
    if (sys.n_params > 0) z.segment(lo.p(), lo.np) = guess_params;

    // stage guess from linear interpolation of the mesh states
    for (int i = 0; i < N; ++i) {
        const double h = tmesh[i + 1] - tmesh[i];
        for (int j = 0; j < kStages; ++j) {
            const Vec xs = (1.0 - kNodes[j]) * guess_states.row(i).transpose() +
                           kNodes[j] * guess_states.row(i + 1).transpose();
            z.segment(lo.k(i, j), d) = sys.rhs(tmesh[i] + kNodes[j] * h, xs, z.segment(lo.p(), lo.np));
        }
    }

    Eigen::SparseLU<Sparse> lu;
    bool analyzed = false;

    CollocationResult res;
    res.tmesh = tmesh;
    double nr = assemble_residual(sys, lo, tmesh, z, boundary_rows, mesh_rows).lpNorm<Eigen::Infinity>();
    int it = 0;
    for (; it < opts.max_newton; ++it) {
        if (nr <= opts.newton_tol) break;
        Sparse J = assemble_jacobian(sys, lo, tmesh, z, boundary_rows, mesh_rows);
        if (!analyzed) {
            lu.analyzePattern(J);
            analyzed = true;
        }
        lu.factorize(J);
        if (lu.info() != Eigen::Success)
            throw NoConnectionError("collocation: singular Newton matrix", nr);
        const Vec F = assemble_residual(sys, lo, tmesh, z, boundary_rows, mesh_rows);
        const Vec dz = lu.solve(-F);

        double alpha = 1.0;
        bool accepted = false;
        while (alpha >= 1.0 / 1024.0) {
            const Vec z_try = z + alpha * dz;
            const double nr_try =
                assemble_residual(sys, lo, tmesh, z_try, boundary_rows, mesh_rows).lpNorm<Eigen::Infinity>();
            if (nr_try < nr || nr_try <= opts.newton_tol) {
                z = z_try;
                nr = nr_try;
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) throw NoConnectionError("collocation: Newton line search stalled", nr);
    }
    if (nr > opts.newton_tol)
        throw NoConnectionError("collocation: no convergence in " + std::to_string(opts.max_newton) +
                                " iterations", nr);

    res.newton_iters = it;
    res.residual_norm = nr;
    res.converged = true;
    res.states = Mat(N + 1, d);
    for (int i = 0; i <= N; ++i) res.states.row(i) = z.segment(lo.x(i), d).transpose();
    res.stages.resize(static_cast<std::size_t>(N));
    for (int i = 0; i < N; ++i) {
        Mat K(kStages, d);
        for (int j = 0; j < kStages; ++j) K.row(j) = z.segment(lo.k(i, j), d).transpose();
        res.stages[static_cast<std::size_t>(i)] = std::move(K);
    }
    res.params = z.segment(lo.p(), lo.np);
    if (opts.estimate_condition) {
        const Sparse J = assemble_jacobian(sys, lo, tmesh, z, boundary_rows, mesh_rows);
        res.condition_estimate = estimate_condition(J);
    }
    return res;
}

}  // namespace mpep
