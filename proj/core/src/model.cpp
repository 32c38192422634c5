#include "mpep/model.hpp"

#include <cmath>
#include <stdexcept>

#include "mpep/errors.hpp"

namespace mpep {

namespace {

void require_finite(const Vec& x, const char* what) {
    if (!x.allFinite()) throw std::invalid_argument(std::string(what) + ": non-finite input");
}

void require_dim(const VectorFieldModel& m, const Vec& x) {
    if (x.size() != m.n) throw std::invalid_argument("model: state dimension mismatch");
}

}  // namespace

Vec drift(const VectorFieldModel& m, const Vec& x, double mu) {
    require_dim(m, x);
    require_finite(x, "drift");
    if (mu == 0.0) return m.f(x);
    return m.f(x) + mu * m.g(x);
}

Mat drift_jacobian(const VectorFieldModel& m, const Vec& x, double mu) {
    require_dim(m, x);
    require_finite(x, "drift_jacobian");
    if (mu == 0.0) return m.f_jac(x);
    return m.f_jac(x) + mu * m.g_jac(x);
}

SymmetryReport jacobian_symmetry(const std::function<Mat(const Vec&)>& jac,
                                 const std::vector<Vec>& sample_points, double tol) {
    if (sample_points.empty())
        throw std::invalid_argument("jacobian_symmetry: empty sample list");
    SymmetryReport rep;
    for (const Vec& x : sample_points) {
        const Mat J = jac(x);
        const double a = (J - J.transpose()).cwiseAbs().rowwise().sum().maxCoeff();
        rep.max_asymmetry = std::max(rep.max_asymmetry, a);
    }
    rep.pass = rep.max_asymmetry <= tol;
    return rep;
}

SymmetryReport check_symmetry(const VectorFieldModel& m,
                              const std::vector<Vec>& sample_points, double tol) {
    return jacobian_symmetry(m.f_jac, sample_points, tol);
}

Path asymmetry_indicator(const VectorFieldModel& m, const Path& path) {
    if (path.dim() != m.n)
        throw std::invalid_argument("asymmetry_indicator: path dimension mismatch");
    Path out;
    out.times = path.times;
    out.states = Mat(path.size(), 1);
    for (std::size_t i = 0; i < path.size(); ++i) {
        const Vec x = path.state(i);
        const Mat Dg = m.g_jac(x);
        out.states(static_cast<Eigen::Index>(i), 0) =
            (2.0 * (Dg.transpose() - Dg) * m.f(x)).norm();
    }
    return out;
}

void validate_base_symmetry(const VectorFieldModel& m, const ModelValidationOptions& opts) {
    Vec lo = opts.box_lo.size() ? opts.box_lo : Vec::Constant(m.n, -2.0);
    Vec hi = opts.box_hi.size() ? opts.box_hi : Vec::Constant(m.n, 2.0);
    if (lo.size() != m.n || hi.size() != m.n)
        throw std::invalid_argument("validate_base_symmetry: box dimension mismatch");

    // full grid for n <= 2, axis sweeps plus diagonal for higher n
    std::vector<Vec> pts;
    const int k = opts.grid_per_axis;
    if (m.n == 1) {
        for (int i = 0; i < k; ++i)
            pts.push_back(lo + (hi - lo) * (i + 0.5) / k);
    } else if (m.n == 2) {
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) {
                Vec x(2);
                x << lo(0) + (hi(0) - lo(0)) * (i + 0.5) / k,
                     lo(1) + (hi(1) - lo(1)) * (j + 0.5) / k;
                pts.push_back(x);
            }
    } else {
        for (int i = 0; i < k; ++i) {
            const double s = (i + 0.5) / k;
            pts.push_back(lo + s * (hi - lo));
            for (int ax = 0; ax < m.n; ++ax) {
                Vec x = 0.5 * (lo + hi);
                x(ax) = lo(ax) + s * (hi(ax) - lo(ax));
                pts.push_back(x);
            }
        }
    }
    const SymmetryReport rep = jacobian_symmetry(m.f_jac, pts, opts.tol);
    if (!rep.pass)
        throw UnsupportedModelError("model '" + m.name +
                                    "': base Jacobian asymmetric (max asymmetry " +
                                    std::to_string(rep.max_asymmetry) + ")");
}

VectorFieldModel builtin_double_well() {
    VectorFieldModel m;
    m.n = 2;
    m.name = "double_well";
    m.f = [](const Vec& x) {
        Vec r(2);
        r << x(0) - x(0) * x(0) * x(0), -x(1);
        return r;
    };
    m.f_jac = [](const Vec& x) {
        Mat J = Mat::Zero(2, 2);
        J(0, 0) = 1.0 - 3.0 * x(0) * x(0);
        J(1, 1) = -1.0;
        return J;
    };
    m.g = [](const Vec& x) {
        Vec r(2);
        r << -x(1), 0.0;
        return r;
    };
    m.g_jac = [](const Vec&) {
        Mat J = Mat::Zero(2, 2);
        J(0, 1) = -1.0;
        return J;
    };
    m.potential = [](const Vec& x) {
        const double x1 = x(0), x2 = x(1);
        return 0.25 * x1 * x1 * x1 * x1 - 0.5 * x1 * x1 + 0.5 * x2 * x2;
    };
    m.drift_raw = [](const double* x, double mu, double* out) {
        out[0] = x[0] - x[0] * x[0] * x[0] - mu * x[1];
        out[1] = -x[1];
    };
    return m;
}

VectorFieldModel builtin_double_well_symmetric_g() {
    VectorFieldModel m = builtin_double_well();
    m.name = "double_well_symmetric_g";
    m.g = [](const Vec& x) {
        Vec r(2);
        r << x(1), x(0);
        return r;
    };
    m.g_jac = [](const Vec&) {
        Mat J = Mat::Zero(2, 2);
        J(0, 1) = 1.0;
        J(1, 0) = 1.0;
        return J;
    };
    m.drift_raw = [](const double* x, double mu, double* out) {
        out[0] = x[0] - x[0] * x[0] * x[0] + mu * x[1];
        out[1] = -x[1] + mu * x[0];
    };
    return m;
}

VectorFieldModel builtin_double_well_zero_g() {
    VectorFieldModel m = builtin_double_well();
    m.name = "double_well_zero_g";
    m.g = [](const Vec& x) { return Vec(Vec::Zero(x.size())); };
    m.g_jac = [](const Vec& x) { return Mat(Mat::Zero(x.size(), x.size())); };
    m.drift_raw = [](const double* x, double, double* out) {
        out[0] = x[0] - x[0] * x[0] * x[0];
        out[1] = -x[1];
    };
    return m;
}

ModelRegistry::ModelRegistry() {
    factories_["double_well"] = builtin_double_well;
    factories_["double_well_symmetric_g"] = builtin_double_well_symmetric_g;
    factories_["double_well_zero_g"] = builtin_double_well_zero_g;
}

ModelRegistry& ModelRegistry::instance() {
    static ModelRegistry reg;
    return reg;
}

void ModelRegistry::register_model(const std::string& name,
                                   std::function<VectorFieldModel()> factory,
                                   const ModelValidationOptions& opts) {
    validate_base_symmetry(factory(), opts);
    factories_[name] = std::move(factory);
}

VectorFieldModel ModelRegistry::create(const std::string& name) const {
    auto it = factories_.find(name);
    if (it == factories_.end())
        throw UnsupportedModelError("unknown model '" + name + "'");
    return it->second();
}

bool ModelRegistry::contains(const std::string& name) const {
    return factories_.count(name) > 0;
}

std::vector<std::string> ModelRegistry::names() const {
    std::vector<std::string> out;
    for (const auto& [k, v] : factories_) out.push_back(k);
    return out;
}

}  // namespace mpep
