#ifndef MPEP_MODEL_HPP
#define MPEP_MODEL_HPP

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mpep/path.hpp"

namespace mpep {

/// A vector field  x' = f(x) + mu*g(x)  with f = -grad V the gradient part
/// and g the (generally non-gradient) perturbation. Jacobians are analytic;
/// finite differences are only used to cross-check them. The coupling mu is
/// never stored here: every operation that needs it takes it explicitly.
///
/// Instances are immutable after construction and safe to share across
/// threads; all evaluation functions are pure.
struct VectorFieldModel {
    int n = 0;
    std::string name;
    std::function<Vec(const Vec&)> f;
    std::function<Mat(const Vec&)> f_jac;
    std::function<Vec(const Vec&)> g;
    std::function<Mat(const Vec&)> g_jac;
    std::function<double(const Vec&)> potential;  // empty when f is not an explicit gradient

    // Optional allocation-free drift kernel for tight simulation loops;
    // must agree with f + mu*g.
    std::function<void(const double* x, double mu, double* out)> drift_raw;

    bool has_potential() const { return static_cast<bool>(potential); }
};

Vec drift(const VectorFieldModel& m, const Vec& x, double mu);
Mat drift_jacobian(const VectorFieldModel& m, const Vec& x, double mu);

struct SymmetryReport {
    double max_asymmetry = 0.0;
    bool pass = false;
};

/// Max over the sample points of the infinity norm of J - J^T for an
/// arbitrary Jacobian map.
SymmetryReport jacobian_symmetry(const std::function<Mat(const Vec&)>& jac,
                                 const std::vector<Vec>& sample_points, double tol);

/// Same check applied to the model's base Jacobian f_jac.
SymmetryReport check_symmetry(const VectorFieldModel& m,
                              const std::vector<Vec>& sample_points, double tol);

/// Scalar path: at each grid time the Euclidean norm of
///   2 (g_jac^T - g_jac) f
/// evaluated along `path`. The factor 2 matches the forcing convention of
/// the first-order correction problem (see melnikov.hpp); a nonzero value
/// anywhere on the unperturbed escape path certifies that the escape path
/// and the time-reversed heteroclinic separate at first order.
Path asymmetry_indicator(const VectorFieldModel& m, const Path& path);

/// Options for the symmetry screen applied at registration.
struct ModelValidationOptions {
    Vec box_lo, box_hi;         // defaults to [-2,2]^n when empty
    int grid_per_axis = 10;
    double tol = 1e-8;
};

/// Rejects base fields whose Jacobian is not symmetric on a sample grid
/// (throws UnsupportedModelError). Called by the registry; also usable
/// directly for programmatically constructed models.
void validate_base_symmetry(const VectorFieldModel& m,
                            const ModelValidationOptions& opts = {});

/// Double-well example:
///   f(x) = (x1 - x1^3, -x2),  g(x) = (-x2, 0),
///   V(x) = x1^4/4 - x1^2/2 + x2^2/2.
/// Stable equilibria (-1,0), (1,0); saddle (0,0).
VectorFieldModel builtin_double_well();

/// Same f and V with the symmetric perturbation g(x) = (x2, x1).
VectorFieldModel builtin_double_well_symmetric_g();

/// Same f and V with g identically zero.
VectorFieldModel builtin_double_well_zero_g();

/// Name -> model lookup used by the CLI. Custom models register through
/// `register_model`, which applies the symmetry screen.
class ModelRegistry {
public:
    static ModelRegistry& instance();

    void register_model(const std::string& name,
                        std::function<VectorFieldModel()> factory,
                        const ModelValidationOptions& opts = {});
    VectorFieldModel create(const std::string& name) const;
    bool contains(const std::string& name) const;
    std::vector<std::string> names() const;

private:
    ModelRegistry();
    std::map<std::string, std::function<VectorFieldModel()>> factories_;
};

}  // namespace mpep

#endif
