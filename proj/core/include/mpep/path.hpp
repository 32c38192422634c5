#ifndef MPEP_PATH_HPP
#define MPEP_PATH_HPP

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace mpep {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// A state trajectory sampled on a strictly increasing time grid.
/// Row i of `states` is the state at `times[i]`. This is the common
/// currency between the solvers, the action quadrature and file I/O.
struct Path {
    std::vector<double> times;
    Mat states;  // size() x dim()

    Path() = default;
    Path(std::vector<double> t, Mat x) : times(std::move(t)), states(std::move(x)) {}

    int dim() const { return static_cast<int>(states.cols()); }
    std::size_t size() const { return times.size(); }
    bool empty() const { return times.empty(); }

    Vec state(std::size_t i) const { return states.row(static_cast<Eigen::Index>(i)).transpose(); }
    void set_state(std::size_t i, const Vec& x) { states.row(static_cast<Eigen::Index>(i)) = x.transpose(); }

    Vec start() const { return state(0); }
    Vec end() const { return state(size() - 1); }

    /// Throws std::invalid_argument unless times are strictly increasing,
    /// sizes agree and all entries are finite.
    void validate() const;

    /// True when the grid spacing is uniform to relative tolerance `rtol`.
    bool uniform_grid(double rtol = 1e-9) const;

    /// Piecewise-linear interpolation; t is clamped to the grid range.
    Vec interpolate(double t) const;

    /// CSV with header `t,x1,...,xd`, 17 significant digits per value.
    void write_csv(const std::string& filename) const;
    static Path read_csv(const std::string& filename);
};

/// max_i max_k |a_ik - b_ik| on matching grids.
double linf_distance(const Path& a, const Path& b);

/// L2 norm in time of the pointwise difference over components
/// [first_comp, first_comp+n_comp), trapezoid rule. n_comp < 0 means all.
double l2_distance(const Path& a, const Path& b, int first_comp = 0, int n_comp = -1);

/// sup_i of the Euclidean norm of row i.
double sup_row_norm(const Path& p);

std::string format_full(double v);  // %.17g, used for all CSV output

}  // namespace mpep

#endif
