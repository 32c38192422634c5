#include "mpep/equilibrium.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "mpep/errors.hpp"

namespace mpep {

namespace {

// Real basis of the invariant subspace for eigenvalues with sign(Re) as
// requested; complex pairs contribute their real and imaginary parts once.
Mat collect_basis(const Eigen::EigenSolver<Mat>& es, bool stable, int expected_dim) {
    const auto& vals = es.eigenvalues();
    const auto& vecs = es.eigenvectors();
    const int d = static_cast<int>(vals.size());
    Mat cols(d, expected_dim);
    int c = 0;
    for (int i = 0; i < d && c < expected_dim; ++i) {
        if ((vals(i).real() < 0.0) != stable) continue;
        if (vals(i).imag() > 0.0) {
            cols.col(c++) = vecs.col(i).real();
            if (c < expected_dim) cols.col(c++) = vecs.col(i).imag();
        } else if (vals(i).imag() == 0.0) {
            cols.col(c++) = vecs.col(i).real();
        }
        // imag < 0: conjugate partner already contributed
    }
    if (c != expected_dim)
        throw UnsupportedModelError("split_spectrum: defective invariant subspace");
    // orthonormalize
    Eigen::HouseholderQR<Mat> qr(cols);
    Mat Q = qr.householderQ() * Mat::Identity(d, expected_dim);
    // rank check through the R diagonal
    Mat R = qr.matrixQR().topLeftCorner(expected_dim, expected_dim).triangularView<Eigen::Upper>();
    for (int i = 0; i < expected_dim; ++i)
        if (std::abs(R(i, i)) < 1e-10)
            throw UnsupportedModelError("split_spectrum: defective invariant subspace");
    return Q;
}

}  // namespace

SpectralSplit split_spectrum(const Mat& jacobian, double hyperbolicity_tol) {
    Eigen::EigenSolver<Mat> es(jacobian);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("split_spectrum: eigensolver failed");
    SpectralSplit out;
    out.eigenvalues = es.eigenvalues();
    int ns = 0;
    for (Eigen::Index i = 0; i < out.eigenvalues.size(); ++i) {
        if (std::abs(out.eigenvalues(i).real()) < hyperbolicity_tol)
            throw NonHyperbolicError("eigenvalue with |Re| = " +
                                     std::to_string(std::abs(out.eigenvalues(i).real())) +
                                     " below hyperbolicity tolerance");
        if (out.eigenvalues(i).real() < 0.0) ++ns;
    }
    out.stable_dim = ns;
    out.unstable_dim = static_cast<int>(out.eigenvalues.size()) - ns;
    out.stable_basis = collect_basis(es, /*stable=*/true, out.stable_dim);
    out.unstable_basis = collect_basis(es, /*stable=*/false, out.unstable_dim);
    return out;
}

Mat orthonormal_complement(const Mat& Q) {
    const int d = static_cast<int>(Q.rows());
    const int k = static_cast<int>(Q.cols());
    if (k == 0) return Mat::Identity(d, d);
    if (k == d) return Mat(d, 0);
    Eigen::HouseholderQR<Mat> qr(Q);
    Mat full = qr.householderQ();
    return full.rightCols(d - k);
}

double Equilibrium::spectral_gap() const {
    double gap = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < eigenvalues.size(); ++i)
        gap = std::min(gap, std::abs(eigenvalues(i).real()));
    return gap;
}

Equilibrium refine_equilibrium(const std::function<Vec(const Vec&)>& rhs,
                               const std::function<Mat(const Vec&)>& jac,
                               const Vec& guess, const EquilibriumOptions& opts) {
    Vec x = guess;
    double res = rhs(x).lpNorm<Eigen::Infinity>();
    for (int it = 0; it < opts.max_iter && res > opts.newton_tol; ++it) {
        const Vec r = rhs(x);
        const Vec dx = jac(x).partialPivLu().solve(r);
        x -= dx;
        res = rhs(x).lpNorm<Eigen::Infinity>();
        if (!x.allFinite()) throw NoEquilibriumError("equilibrium refinement diverged");
    }
    if (res > 1e-12)
        throw NoEquilibriumError("no equilibrium near the supplied guess (residual " +
                                 std::to_string(res) + ")");
    Equilibrium eq;
    eq.location = x;
    eq.jacobian = jac(x);
    SpectralSplit split = split_spectrum(eq.jacobian, opts.hyperbolicity_tol);
    eq.eigenvalues = std::move(split.eigenvalues);
    eq.stable_basis = std::move(split.stable_basis);
    eq.unstable_basis = std::move(split.unstable_basis);
    eq.stable_dim = split.stable_dim;
    eq.unstable_dim = split.unstable_dim;
    return eq;
}

}  // namespace mpep
