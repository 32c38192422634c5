#ifndef MPEP_RUN_CONFIG_HPP
#define MPEP_RUN_CONFIG_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "mpep/heteroclinic.hpp"

namespace mpep {

/// Flat INI-style run configuration (`key = value`, sections in brackets,
/// `#` or `;` comments). Unknown sections or keys are rejected. Every CLI
/// run echoes the effective values to resolved_config.txt.
///
///   model = double_well
///   out   = <default output directory>
///   [bvp]       T, mesh, newton_tol, bc_offset, max_newton
///   [melnikov]  fd_mu
///   [sde]       eps, mu, dt, tmax, n, seed, eta, n_anchor
///   [sweep]     mus (comma-separated)
struct SdeSettings {
    double eps = 0.25;
    double mu = 0.0;
    double dt = 1e-3;
    double tmax = 5e3;
    int n = 500;
    std::uint64_t seed = 1;
    double eta = 0.1;
    int n_anchor = 101;
};

struct MelnikovSettings {
    double fd_mu = 1e-4;
};

struct SweepSettings {
    std::vector<double> mus{1e-3, 2e-3, 5e-3, 1e-2};
};

struct RunConfig {
    std::string model = "double_well";
    std::string output_dir;  // empty: taken from the CLI
    BvpConfig bvp;
    MelnikovSettings melnikov;
    SdeSettings sde;
    SweepSettings sweep;

    static RunConfig from_file(const std::string& filename);
    static RunConfig from_string(const std::string& text);

    /// Echo of every effective value, in config syntax.
    std::string resolved_text() const;
};

}  // namespace mpep

#endif
