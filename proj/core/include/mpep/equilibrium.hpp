#ifndef MPEP_EQUILIBRIUM_HPP
#define MPEP_EQUILIBRIUM_HPP

#include <Eigen/Dense>
#include <functional>

#include "mpep/path.hpp"

namespace mpep {

/// Orthonormal bases of the stable/unstable invariant subspaces of a matrix,
/// split by the sign of Re(lambda).
struct SpectralSplit {
    Eigen::VectorXcd eigenvalues;
    Mat stable_basis;    // d x stable_dim
    Mat unstable_basis;  // d x unstable_dim
    int stable_dim = 0;
    int unstable_dim = 0;
};

/// Throws NonHyperbolicError if some |Re(lambda)| < hyperbolicity_tol, and
/// UnsupportedModelError if an invariant subspace turns out defective.
SpectralSplit split_spectrum(const Mat& jacobian, double hyperbolicity_tol = 1e-6);

/// Orthonormal basis of the orthogonal complement of span(Q), Q orthonormal.
Mat orthonormal_complement(const Mat& Q);

/// A refined hyperbolic fixed point with its eigen-structure.
struct Equilibrium {
    Vec location;
    Mat jacobian;
    Eigen::VectorXcd eigenvalues;
    Mat stable_basis;
    Mat unstable_basis;
    int stable_dim = 0;
    int unstable_dim = 0;

    int dim() const { return static_cast<int>(location.size()); }
    /// Slowest contraction/expansion rate, min |Re(lambda)|.
    double spectral_gap() const;
};

struct EquilibriumOptions {
    double newton_tol = 1e-13;   // target residual; 1e-12 is enforced
    int max_iter = 50;
    double hyperbolicity_tol = 1e-6;
};

/// Newton refinement of `guess` for the autonomous system rhs/jac, followed
/// by the spectral split. Throws NoEquilibriumError on non-convergence and
/// NonHyperbolicError via split_spectrum.
Equilibrium refine_equilibrium(const std::function<Vec(const Vec&)>& rhs,
                               const std::function<Mat(const Vec&)>& jac,
                               const Vec& guess,
                               const EquilibriumOptions& opts = {});

}  // namespace mpep

#endif
