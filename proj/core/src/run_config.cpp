#include "mpep/run_config.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "mpep/errors.hpp"
#include "mpep/path.hpp"

namespace mpep {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    std::size_t e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? "" : s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config: bad numeric value for '" + key + "': " + v);
    }
}

int to_int(const std::string& key, const std::string& v) {
    const double x = to_double(key, v);
    const int i = static_cast<int>(x);
    if (static_cast<double>(i) != x)
        throw ConfigError("config: '" + key + "' must be an integer, got " + v);
    return i;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        const unsigned long long x = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config: bad seed value for '" + key + "': " + v);
    }
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        cell = trim(cell);
        if (!cell.empty()) out.push_back(to_double(key, cell));
    }
    if (out.empty()) throw ConfigError("config: empty list for '" + key + "'");
    return out;
}

}  // namespace

RunConfig RunConfig::from_string(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t comment = line.find_first_of("#;");
        if (comment != std::string::npos) line = line.substr(0, comment);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("config line " + std::to_string(lineno) + ": malformed section");
            section = trim(line.substr(1, line.size() - 2));
            if (section != "bvp" && section != "melnikov" && section != "sde" && section != "sweep")
                throw ConfigError("config: unknown section [" + section + "]");
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty())
            throw ConfigError("config line " + std::to_string(lineno) + ": empty key or value");

        if (section.empty()) {
            if (key == "model")
                cfg.model = val;
            else if (key == "out")
                cfg.output_dir = val;
            else
                throw ConfigError("config: unknown key '" + key + "'");
        } else if (section == "bvp") {
            if (key == "T")
                cfg.bvp.T = to_double(key, val);
            else if (key == "mesh")
                cfg.bvp.mesh = to_int(key, val);
            else if (key == "newton_tol")
                cfg.bvp.newton_tol = to_double(key, val);
            else if (key == "bc_offset")
                cfg.bvp.bc_offset = to_double(key, val);
            else if (key == "max_newton")
                cfg.bvp.max_newton = to_int(key, val);
            else
                throw ConfigError("config: unknown key '" + key + "' in [bvp]");
        } else if (section == "melnikov") {
            if (key == "fd_mu")
                cfg.melnikov.fd_mu = to_double(key, val);
            else
                throw ConfigError("config: unknown key '" + key + "' in [melnikov]");
        } else if (section == "sde") {
            if (key == "eps")
                cfg.sde.eps = to_double(key, val);
            else if (key == "mu")
                cfg.sde.mu = to_double(key, val);
            else if (key == "dt")
                cfg.sde.dt = to_double(key, val);
            else if (key == "tmax")
                cfg.sde.tmax = to_double(key, val);
            else if (key == "n")
                cfg.sde.n = to_int(key, val);
            else if (key == "seed")
                cfg.sde.seed = to_u64(key, val);
            else if (key == "eta")
                cfg.sde.eta = to_double(key, val);
            else if (key == "n_anchor")
                cfg.sde.n_anchor = to_int(key, val);
            else
                throw ConfigError("config: unknown key '" + key + "' in [sde]");
        } else if (section == "sweep") {
            if (key == "mus")
                cfg.sweep.mus = to_list(key, val);
            else
                throw ConfigError("config: unknown key '" + key + "' in [sweep]");
        }
    }

    if (cfg.bvp.T <= 0 || cfg.bvp.mesh < 2 || cfg.bvp.newton_tol <= 0 || cfg.bvp.max_newton < 1)
        throw ConfigError("config: invalid [bvp] values");
    if (cfg.sde.eps < 0 || cfg.sde.dt <= 0 || cfg.sde.tmax < cfg.sde.dt || cfg.sde.n < 1)
        throw ConfigError("config: invalid [sde] values");
    return cfg;
}

RunConfig RunConfig::from_file(const std::string& filename) {
    std::ifstream in(filename);
    if (!in) throw ConfigError("config: cannot open " + filename);
    std::stringstream ss;
    ss << in.rdbuf();
    return from_string(ss.str());
}

std::string RunConfig::resolved_text() const {
    std::ostringstream os;
    os << "model = " << model << "\n";
    if (!output_dir.empty()) os << "out = " << output_dir << "\n";
    os << "\n[bvp]\n";
    os << "T = " << format_full(bvp.T) << "\n";
    os << "mesh = " << bvp.mesh << "\n";
    os << "newton_tol = " << format_full(bvp.newton_tol) << "\n";
    os << "bc_offset = " << format_full(bvp.bc_offset) << "\n";
    os << "max_newton = " << bvp.max_newton << "\n";
    os << "\n[melnikov]\n";
    os << "fd_mu = " << format_full(melnikov.fd_mu) << "\n";
    os << "\n[sde]\n";
    os << "eps = " << format_full(sde.eps) << "\n";
    os << "mu = " << format_full(sde.mu) << "\n";
    os << "dt = " << format_full(sde.dt) << "\n";
    os << "tmax = " << format_full(sde.tmax) << "\n";
    os << "n = " << sde.n << "\n";
    os << "seed = " << sde.seed << "\n";
    os << "eta = " << format_full(sde.eta) << "\n";
    os << "n_anchor = " << sde.n_anchor << "\n";
    os << "\n[sweep]\n";
    os << "mus = ";
    for (std::size_t i = 0; i < sweep.mus.size(); ++i)
        os << (i ? "," : "") << format_full(sweep.mus[i]);
    os << "\n";
    return os.str();
}

}  // namespace mpep
