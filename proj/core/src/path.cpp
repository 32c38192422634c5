#include "mpep/path.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mpep {

std::string format_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void Path::validate() const {
    if (times.size() < 2) throw std::invalid_argument("path: need at least two points");
    if (static_cast<Eigen::Index>(times.size()) != states.rows())
        throw std::invalid_argument("path: times/states size mismatch");
    for (std::size_t i = 0; i + 1 < times.size(); ++i)
        if (!(times[i] < times[i + 1]))
            throw std::invalid_argument("path: times not strictly increasing");
    for (double t : times)
        if (!std::isfinite(t)) throw std::invalid_argument("path: non-finite time");
    if (!states.allFinite()) throw std::invalid_argument("path: non-finite state");
}

bool Path::uniform_grid(double rtol) const {
    if (times.size() < 3) return true;
    const double h0 = times[1] - times[0];
    for (std::size_t i = 1; i + 1 < times.size(); ++i)
        if (std::abs(times[i + 1] - times[i] - h0) > rtol * std::abs(h0)) return false;
    return true;
}

Vec Path::interpolate(double t) const {
    if (t <= times.front()) return start();
    if (t >= times.back()) return end();
    auto it = std::upper_bound(times.begin(), times.end(), t);
    const std::size_t i = static_cast<std::size_t>(it - times.begin()) - 1;
    const double w = (t - times[i]) / (times[i + 1] - times[i]);
    return (1.0 - w) * state(i) + w * state(i + 1);
}

void Path::write_csv(const std::string& filename) const {
    std::ofstream out(filename);
    if (!out) throw std::runtime_error("cannot open for writing: " + filename);
    out << "t";
    for (int k = 1; k <= dim(); ++k) out << ",x" << k;
    out << "\n";
    for (std::size_t i = 0; i < size(); ++i) {
        out << format_full(times[i]);
        for (int k = 0; k < dim(); ++k) out << "," << format_full(states(static_cast<Eigen::Index>(i), k));
        out << "\n";
    }
}

Path Path::read_csv(const std::string& filename) {
    std::ifstream in(filename);
    if (!in) throw std::runtime_error("cannot open: " + filename);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty csv: " + filename);
    int ncols = 1;
    for (char c : line)
        if (c == ',') ++ncols;
    const int d = ncols - 1;
    if (d < 1) throw std::runtime_error("csv needs a t column and at least one state column");

    std::vector<double> ts;
    std::vector<double> flat;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        int col = 0;
        while (std::getline(ss, cell, ',')) {
            const double v = std::stod(cell);
            if (col == 0)
                ts.push_back(v);
            else
                flat.push_back(v);
            ++col;
        }
        if (col != ncols) throw std::runtime_error("ragged csv row in " + filename);
    }
    Path p;
    p.times = std::move(ts);
    p.states = Mat(p.times.size(), d);
    for (std::size_t i = 0; i < p.times.size(); ++i)
        for (int k = 0; k < d; ++k) p.states(static_cast<Eigen::Index>(i), k) = flat[i * d + k];
    p.validate();
    return p;
}

double linf_distance(const Path& a, const Path& b) {
    if (a.size() != b.size() || a.dim() != b.dim())
        throw std::invalid_argument("linf_distance: grids do not match");
    return (a.states - b.states).cwiseAbs().maxCoeff();
}

double l2_distance(const Path& a, const Path& b, int first_comp, int n_comp) {
    if (a.size() != b.size() || a.dim() != b.dim())
        throw std::invalid_argument("l2_distance: grids do not match");
    if (n_comp < 0) n_comp = a.dim() - first_comp;
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < a.size(); ++i) {
        const double h = a.times[i + 1] - a.times[i];
        const double s0 = (a.states.row(static_cast<Eigen::Index>(i)) - b.states.row(static_cast<Eigen::Index>(i)))
                              .segment(first_comp, n_comp).squaredNorm();
        const double s1 = (a.states.row(static_cast<Eigen::Index>(i + 1)) - b.states.row(static_cast<Eigen::Index>(i + 1)))
                              .segment(first_comp, n_comp).squaredNorm();
        acc += 0.5 * h * (s0 + s1);
    }
    return std::sqrt(acc);
}

double sup_row_norm(const Path& p) {
    double m = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) m = std::max(m, p.state(i).norm());
    return m;
}

}  // namespace mpep
