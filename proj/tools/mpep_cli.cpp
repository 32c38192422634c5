// Command-line front end: equilibria -> heteroclinics -> escape path ->
// first-order corrections -> mu sweep -> Monte Carlo simulation.

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "mpep/errors.hpp"
#include "mpep/melnikov.hpp"
#include "mpep/rate_functional.hpp"
#include "mpep/run_config.hpp"
#include "mpep/sde.hpp"

namespace fs = std::filesystem;
using namespace mpep;

namespace {

struct GlobalOptions {
    std::string config_file;
    std::string out_dir;
    bool force = false;
    int threads = 1;
};

Vec v2(double a, double b) {
    Vec x(2);
    x << a, b;
    return x;
}

// built-in double-well equilibrium guesses; custom models go through the
// library API, not the CLI
const Vec kAttractorGuess = v2(-0.9, 0.0);
const Vec kSaddleGuess = v2(0.05, 0.0);

RunConfig load_config(const GlobalOptions& g) {
    RunConfig cfg = g.config_file.empty() ? RunConfig{} : RunConfig::from_file(g.config_file);
    if (!g.out_dir.empty()) cfg.output_dir = g.out_dir;
    return cfg;
}

fs::path prepare_output_dir(const RunConfig& cfg, const GlobalOptions& g,
                            const std::string& command) {
    fs::path dir = cfg.output_dir.empty() ? fs::path("mpep_" + command) : fs::path(cfg.output_dir);
    if (fs::exists(dir)) {
        if (!g.force)
            throw ConfigError("output directory '" + dir.string() +
                              "' exists; pass --force to overwrite");
    } else {
        fs::create_directories(dir);
    }
    std::ofstream echo(dir / "resolved_config.txt");
    echo << cfg.resolved_text();
    return dir;
}

void write_text(const fs::path& file, const std::string& text) {
    std::ofstream out(file);
    out << text;
}

std::string eig_string(const Equilibrium& eq) {
    std::ostringstream os;
    os << "{";
    for (Eigen::Index i = 0; i < eq.eigenvalues.size(); ++i) {
        if (i) os << ", ";
        os << eq.eigenvalues(i).real();
        if (std::abs(eq.eigenvalues(i).imag()) > 1e-14) os << (eq.eigenvalues(i).imag() > 0 ? "+" : "") << eq.eigenvalues(i).imag() << "i";
    }
    os << "}";
    return os.str();
}

std::string point_string(const Vec& x) {
    std::ostringstream os;
    os << "(";
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (i) os << ", ";
        os << x(i);
    }
    os << ")";
    return os.str();
}

// minimal SVG polyline plot; data is a list of (x, y) series
void write_svg(const fs::path& file,
               const std::vector<std::pair<std::string, std::vector<std::pair<double, double>>>>& series,
               const std::string& title) {
    double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
    for (const auto& [name, pts] : series)
        for (const auto& [x, y] : pts) {
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
        }
    if (!(xmax > xmin)) xmax = xmin + 1;
    if (!(ymax > ymin)) ymax = ymin + 1;
    const double W = 640, H = 480, m = 50;
    auto X = [&](double x) { return m + (W - 2 * m) * (x - xmin) / (xmax - xmin); };
    auto Y = [&](double y) { return H - m - (H - 2 * m) * (y - ymin) / (ymax - ymin); };

    std::ofstream out(file);
    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H << "'>\n";
    out << "<rect x='" << m << "' y='" << m << "' width='" << W - 2 * m << "' height='"
        << H - 2 * m << "' fill='none' stroke='black'/>\n";
    out << "<text x='" << W / 2 << "' y='20' text-anchor='middle'>" << title << "</text>\n";
    const char* colors[] = {"steelblue", "crimson", "seagreen", "darkorange"};
    int ci = 0;
    for (const auto& [name, pts] : series) {
        out << "<polyline fill='none' stroke='" << colors[ci % 4] << "' points='";
        for (const auto& [x, y] : pts) out << X(x) << "," << Y(y) << " ";
        out << "'/>\n";
        out << "<text x='" << W - m - 5 << "' y='" << m + 16 * (ci + 1)
            << "' text-anchor='end' fill='" << colors[ci % 4] << "'>" << name << "</text>\n";
        ++ci;
    }
    out << "<text x='" << W / 2 << "' y='" << H - 10 << "' text-anchor='middle'>x</text>\n";
    out << "</svg>\n";
}

int cmd_equilibria(const RunConfig& cfg, const GlobalOptions& g) {
    const auto dir = prepare_output_dir(cfg, g, "equilibria");
    const auto model = ModelRegistry::instance().create(cfg.model);

    std::ostringstream table;
    table << "deterministic system x' = f(x) + mu g(x), mu = 0\n";
    const auto fwd = forward_drift_system(model, 0.0);
    EquilibriumOptions opts;
    for (const Vec& guess : {v2(-0.9, 0.0), v2(0.05, 0.0), v2(0.9, 0.0)}) {
        const Equilibrium eq = refine_equilibrium(fwd.rhs, fwd.jac, guess);
        table << "  " << point_string(eq.location) << "  eigenvalues " << eig_string(eq)
              << "  stable dim " << eq.stable_dim << "  unstable dim " << eq.unstable_dim
              << "\n";
    }
    table << "lifted escape system (u, v), mu = 0\n";
    const auto el = as_autonomous(assemble_v_form(model, 0.0));
    for (const Vec& guess : {v2(-0.9, 0.0), v2(0.05, 0.0)}) {
        Vec g4(4);
        g4 << guess, 0, 0;
        const Equilibrium eq = refine_equilibrium(el.rhs, el.jac, g4);
        table << "  " << point_string(eq.location) << "  eigenvalues " << eig_string(eq)
              << "  stable dim " << eq.stable_dim << "  unstable dim " << eq.unstable_dim
              << "\n";
    }
    std::cout << table.str();
    write_text(dir / "equilibria.txt", table.str());
    return 0;
}

int cmd_het(const RunConfig& cfg, const GlobalOptions& g, double mu) {
    const auto dir = prepare_output_dir(cfg, g, "het");
    const auto model = ModelRegistry::instance().create(cfg.model);
    const auto sol = solve_reversed_heteroclinic(model, mu, cfg.bvp, kAttractorGuess, kSaddleGuess);
    sol.path.write_csv((dir / "het_reversed.csv").string());
    std::cout << "reversed heteroclinic at mu = " << mu << ": residual " << sol.residual_norm
              << ", Newton iterations " << sol.newton_iters << ", T = " << sol.T << "\n"
              << "wrote " << (dir / "het_reversed.csv").string() << "\n";
    return 0;
}

int cmd_mpep(const RunConfig& cfg, const GlobalOptions& g, double mu, bool svg) {
    const auto dir = prepare_output_dir(cfg, g, "mpep");
    const auto model = ModelRegistry::instance().create(cfg.model);
    const auto res = most_probable_escape_path(model, mu, cfg.bvp, kAttractorGuess, kSaddleGuess);

    res.escape_path.write_csv((dir / "mpep.csv").string());
    res.reversed_het.path.write_csv((dir / "het_reversed.csv").string());

    std::ofstream gap_out(dir / "gap.csv");
    gap_out << "t,gap\n";
    double gap_max = 0.0;
    for (std::size_t i = 0; i < res.escape_path.size(); ++i) {
        const double gap =
            (res.escape_path.state(i) - res.reversed_het.path.state(i)).norm();
        gap_max = std::max(gap_max, gap);
        gap_out << format_full(res.escape_path.times[i]) << "," << format_full(gap) << "\n";
    }
    gap_out.close();

    const ActionReport act = action(res.escape_path, model, mu);
    std::ostringstream summary;
    summary << "mu = " << format_full(mu) << "\n";
    summary << "action = " << format_full(act.value) << "\n";
    summary << "gap_max = " << format_full(gap_max) << "\n";
    summary << "unfolding = " << format_full(res.el_solution.unfolding) << "\n";
    summary << "condition_estimate = " << format_full(res.el_solution.condition_estimate) << "\n";
    summary << "tail_bound_start = "
            << format_full(action_tail_bound(res.reversed_het.from_eq,
                                             (res.escape_path.start() -
                                              res.reversed_het.from_eq.location)
                                                 .norm()))
            << "\n";
    summary << "tail_bound_end = "
            << format_full(action_tail_bound(res.reversed_het.to_eq,
                                             (res.escape_path.end() -
                                              res.reversed_het.to_eq.location)
                                                 .norm()))
            << "\n";
    if (res.el_solution.near_tangency) summary << "warning = near-tangency (condition estimate above 1e12)\n";
    std::cout << summary.str();
    write_text(dir / "mpep_summary.txt", summary.str());

    if (svg) {
        std::vector<std::pair<double, double>> mp, het;
        for (std::size_t i = 0; i < res.escape_path.size(); ++i) {
            mp.emplace_back(res.escape_path.states(static_cast<Eigen::Index>(i), 0),
                            res.escape_path.states(static_cast<Eigen::Index>(i), 1));
            het.emplace_back(res.reversed_het.path.states(static_cast<Eigen::Index>(i), 0),
                             res.reversed_het.path.states(static_cast<Eigen::Index>(i), 1));
        }
        write_svg(dir / "mpep.svg", {{"escape path", mp}, {"reversed heteroclinic", het}},
                  "escape path vs reversed heteroclinic");
    }
    return 0;
}

int cmd_correction(const RunConfig& cfg, const GlobalOptions& g, double mu_check) {
    const auto dir = prepare_output_dir(cfg, g, "correction");
    const auto model = ModelRegistry::instance().create(cfg.model);

    const auto base =
        solve_reversed_heteroclinic(model, 0.0, cfg.bvp, kAttractorGuess, kSaddleGuess);
    const CorrectionBundle bundle = compute_corrections(model, base);

    bundle.base.write_csv((dir / "y0.csv").string());
    bundle.path_correction.write_csv((dir / "u1.csv").string());
    bundle.costate_correction.write_csv((dir / "v1.csv").string());
    bundle.displacement.write_csv((dir / "delta1.csv").string());

    // lifted base for the finite-difference cross-check
    const auto el = as_autonomous(assemble_v_form(model, 0.0));
    Vec ga(4), gb(4);
    ga << base.from_eq.location, 0, 0;
    gb << base.to_eq.location, 0, 0;
    const Equilibrium ea = refine_equilibrium(el.rhs, el.jac, ga);
    const Equilibrium eb = refine_equilibrium(el.rhs, el.jac, gb);
    Path lifted;
    lifted.times = base.path.times;
    lifted.states = Mat::Zero(base.path.states.rows(), 4);
    lifted.states.leftCols(2) = base.path.states;
    BvpConfig bcfg = cfg.bvp;
    bcfg.T = base.T;
    bcfg.mesh = static_cast<int>(base.path.times.size()) - 1;
    const auto el_base =
        solve_heteroclinic(el, ea, eb, bcfg, lifted, PhaseCondition::integral(lifted), 0.0);
    const double fd_err =
        finite_difference_cross_check(model, base, el_base, bundle, mu_check, bcfg);

    std::ostringstream diag;
    diag << "# first-order correction diagnostics\n";
    diag << "# forcing convention: 2 (Dg^T - Dg) f along the base orbit\n";
    diag << "solvability_residual_pointwise = " << format_full(bundle.solvability_residual) << "\n";
    diag << "solvability_residual_l2 = " << format_full(bundle.solvability_l2) << "\n";
    diag << "forcing_sup_norm = " << format_full(bundle.forcing_sup_norm) << "\n";
    diag << "displacement_sup_norm = " << format_full(bundle.displacement_sup_norm) << "\n";
    diag << "cokernel_multiplier = " << format_full(bundle.cokernel_multiplier) << "\n";
    diag << "costate_ode_residual = " << format_full(bundle.costate_ode_residual) << "\n";
    diag << "fd_cross_check_mu = " << format_full(mu_check) << "\n";
    diag << "fd_cross_check_error = " << format_full(fd_err) << "\n";
    std::cout << diag.str();
    write_text(dir / "diagnostics.txt", diag.str());
    return 0;
}

int cmd_sweep(const RunConfig& cfg, const GlobalOptions& g, bool svg) {
    const auto dir = prepare_output_dir(cfg, g, "sweep");
    const auto model = ModelRegistry::instance().create(cfg.model);
    std::vector<double> mus = cfg.sweep.mus;

    const auto base =
        solve_reversed_heteroclinic(model, 0.0, cfg.bvp, kAttractorGuess, kSaddleGuess);
    const CorrectionBundle bundle = compute_corrections(model, base);

    const auto el = as_autonomous(assemble_v_form(model, 0.0));
    Vec ga(4), gb(4);
    ga << base.from_eq.location, 0, 0;
    gb << base.to_eq.location, 0, 0;
    const Equilibrium ea = refine_equilibrium(el.rhs, el.jac, ga);
    const Equilibrium eb = refine_equilibrium(el.rhs, el.jac, gb);
    Path lifted;
    lifted.times = base.path.times;
    lifted.states = Mat::Zero(base.path.states.rows(), 4);
    lifted.states.leftCols(2) = base.path.states;
    BvpConfig bcfg = cfg.bvp;
    bcfg.T = base.T;
    bcfg.mesh = static_cast<int>(base.path.times.size()) - 1;
    const auto el_base =
        solve_heteroclinic(el, ea, eb, bcfg, lifted, PhaseCondition::integral(lifted), 0.0);

    // R(mu) = L2 distance between the continued connection and the
    // first-order prediction, over the path components
    SystemFamily family{[model](double m) { return as_autonomous(assemble_v_form(model, m)); }};
    std::vector<double> rs(mus.size(), 0.0);
    std::vector<int> order(mus.size());
    for (std::size_t i = 0; i < mus.size(); ++i) order[i] = static_cast<int>(i);

    auto run_entry = [&](int i) {
        const auto sol = continue_in_mu(family, el_base, {mus[static_cast<std::size_t>(i)]}, bcfg).front();
        Path u_num;
        u_num.times = sol.path.times;
        u_num.states = sol.path.states.leftCols(2);
        Path u_approx;
        u_approx.times = base.path.times;
        u_approx.states =
            base.path.states + mus[static_cast<std::size_t>(i)] * bundle.path_correction.states;
        rs[static_cast<std::size_t>(i)] = l2_distance(u_num, u_approx);
    };
    if (g.threads > 1) {
        std::vector<std::thread> pool;
        std::atomic<int> next{0};
        const int nt = std::min<int>(g.threads, static_cast<int>(mus.size()));
        for (int t = 0; t < nt; ++t)
            pool.emplace_back([&] {
                for (;;) {
                    const int i = next.fetch_add(1);
                    if (i >= static_cast<int>(mus.size())) return;
                    run_entry(i);
                }
            });
        for (auto& th : pool) th.join();
    } else {
        for (std::size_t i = 0; i < mus.size(); ++i) run_entry(static_cast<int>(i));
    }

    std::ofstream csv(dir / "sweep.csv");
    csv << "mu,R\n";
    for (std::size_t i = 0; i < mus.size(); ++i)
        csv << format_full(mus[i]) << "," << format_full(rs[i]) << "\n";
    csv.close();

    // least-squares fit of log R against log mu
    double slope = std::numeric_limits<double>::quiet_NaN();
    double intercept = std::numeric_limits<double>::quiet_NaN();
    std::string note;
    const bool degenerate =
        *std::max_element(rs.begin(), rs.end()) < 1e-10 || mus.size() < 2;
    if (degenerate) {
        note = mus.size() < 2 ? "single mu: slope undefined"
                              : "residuals at solver tolerance: slope fit skipped";
    } else {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const double n = static_cast<double>(mus.size());
        for (std::size_t i = 0; i < mus.size(); ++i) {
            const double x = std::log(mus[i]), y = std::log(rs[i]);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        intercept = (sy - slope * sx) / n;
    }

    std::ostringstream summary;
    summary << "entries = " << mus.size() << "\n";
    summary << "slope = " << format_full(slope) << "\n";
    summary << "intercept = " << format_full(intercept) << "\n";
    if (!note.empty()) summary << "warning = " << note << "\n";
    std::cout << summary.str();
    write_text(dir / "sweep_summary.txt", summary.str());

    if (svg && !degenerate) {
        std::vector<std::pair<double, double>> pts, fit;
        for (std::size_t i = 0; i < mus.size(); ++i)
            pts.emplace_back(std::log10(mus[i]), std::log10(rs[i]));
        const double l10 = std::log(10.0);
        for (const auto& [x, y] : pts)
            fit.emplace_back(x, (intercept + slope * x * l10) / l10);
        write_svg(dir / "sweep.svg", {{"R(mu)", pts}, {"fit", fit}},
                  "log10 R vs log10 mu");
    }
    return 0;
}

int cmd_simulate(const RunConfig& cfg, const GlobalOptions& g) {
    const auto dir = prepare_output_dir(cfg, g, "simulate");
    const auto model = ModelRegistry::instance().create(cfg.model);

    SimConfig sim;
    sim.eps = cfg.sde.eps;
    sim.mu = cfg.sde.mu;
    sim.dt = cfg.sde.dt;
    sim.t_max = cfg.sde.tmax;
    sim.n_paths = cfg.sde.n;
    sim.seed = cfg.sde.seed;
    sim.eta = cfg.sde.eta;
    sim.start = v2(-1, 0);
    sim.exit_rule = ExitRule::hyperplane(v2(1, 0), 0.0);

    const auto ens = simulate(model, sim, g.threads);

    std::ofstream exits(dir / "exits.csv");
    exits << "path_id,exit_time";
    for (int k = 1; k <= model.n; ++k) exits << ",exit_x" << k;
    exits << "\n";
    for (const auto& e : ens.exits) {
        exits << e.path_id << "," << format_full(e.exit_time);
        for (int k = 0; k < model.n; ++k) exits << "," << format_full(e.exit_location(k));
        exits << "\n";
    }
    exits.close();

    std::ostringstream summary;
    summary << "n_paths = " << sim.n_paths << "\n";
    summary << "n_exits = " << ens.exits.size() << "\n";
    summary << "n_no_exit = " << ens.n_no_exit << "\n";
    if (!ens.exits.empty()) {
        const auto st = exit_statistics(ens);
        summary << "mean_exit_time = " << format_full(st.mean_exit_time) << "\n";
        summary << "median_exit_time = " << format_full(st.median_exit_time) << "\n";
        summary << "exit_location_mean = " << point_string(st.exit_location_mean) << "\n";
        summary << "exit_location_cov = [" << format_full(st.exit_location_cov(0, 0)) << ", "
                << format_full(st.exit_location_cov(0, 1)) << "; "
                << format_full(st.exit_location_cov(1, 0)) << ", "
                << format_full(st.exit_location_cov(1, 1)) << "]\n";
        // both scaling conventions: with noise amplitude eps the
        // quasipotential comparison is eps^2 log E[tau]
        summary << "eps_log_mean_time = " << format_full(st.eps_log_mean_time) << "\n";
        summary << "eps2_log_mean_time = " << format_full(st.eps_sq_log_mean_time) << "\n";
        if (ens.exits.size() >= 50) {
            const Path emp = empirical_mpep(ens, cfg.sde.n_anchor);
            emp.write_csv((dir / "empirical_mpep.csv").string());
            summary << "empirical_mpep = " << (dir / "empirical_mpep.csv").string() << "\n";
        } else {
            summary << "empirical_mpep = skipped (need >= 50 exits)\n";
        }
    }
    std::cout << summary.str();
    write_text(dir / "summary.txt", summary.str());
    return 0;
}

int cmd_action(const RunConfig& cfg, const GlobalOptions& g, const std::string& path_file,
               double mu) {
    const auto dir = prepare_output_dir(cfg, g, "action");
    const auto model = ModelRegistry::instance().create(cfg.model);
    const Path p = Path::read_csv(path_file);
    const ActionReport rep = action(p, model, mu);

    std::ostringstream os;
    os << "value = " << format_full(rep.value) << "\n";
    os << "quadrature = " << (rep.quadrature == QuadratureRule::Simpson ? "simpson" : "trapezoid")
       << "\n";
    os << "grid_size = " << rep.grid_size << "\n";
    if (model.has_potential() && mu == 0.0) {
        os << "gradient_lower_bound = "
           << format_full(gradient_lower_bound(model, p.start(), p.end())) << "\n";
        os << "action_excess = " << format_full(action_excess(p, model, mu)) << "\n";
    }
    std::cout << os.str();
    write_text(dir / "action.txt", os.str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"most probable escape paths of noise-perturbed gradient systems"};
    app.require_subcommand(1);

    GlobalOptions g;
    app.add_option("--config", g.config_file, "INI config file");
    app.add_option("--out", g.out_dir, "output directory");
    app.add_flag("--force", g.force, "overwrite an existing output directory");
    app.add_option("--threads", g.threads, "worker threads for sweep/simulate")
        ->check(CLI::Range(1, 256));

    auto* c_eq = app.add_subcommand("equilibria", "refine equilibria and print eigenstructure");

    double het_mu = 0.0;
    auto* c_het = app.add_subcommand("het", "reversed-flow heteroclinic connection");
    c_het->add_option("--mu", het_mu, "perturbation strength");

    double mpep_mu = 0.0;
    bool mpep_svg = false;
    auto* c_mpep = app.add_subcommand("mpep", "most probable escape path");
    c_mpep->add_option("--mu", mpep_mu, "perturbation strength");
    c_mpep->add_flag("--svg", mpep_svg, "write a plot of the paths");

    double mu_check = -1.0;
    auto* c_corr = app.add_subcommand("correction", "first-order corrections and diagnostics");
    c_corr->add_option("--mu-check", mu_check,
                       "finite-difference step for the cross-check (default from config)");

    bool sweep_svg = false;
    auto* c_sweep = app.add_subcommand("sweep", "residual of the first-order expansion over mu");
    c_sweep->add_flag("--svg", sweep_svg, "write a log-log plot with the fit");

    auto* c_sim = app.add_subcommand("simulate", "Euler-Maruyama escape ensemble");
    double f_eps = -1, f_mu = std::numeric_limits<double>::quiet_NaN(), f_dt = -1, f_tmax = -1;
    long long f_n = -1, f_seed = -1;
    c_sim->add_option("--eps", f_eps, "noise amplitude");
    c_sim->add_option("--mu", f_mu, "perturbation strength");
    c_sim->add_option("--n", f_n, "ensemble size");
    c_sim->add_option("--seed", f_seed, "RNG seed");
    c_sim->add_option("--dt", f_dt, "time step");
    c_sim->add_option("--tmax", f_tmax, "horizon");

    std::string action_path;
    double action_mu = 0.0;
    auto* c_act = app.add_subcommand("action", "action of a path read from CSV");
    c_act->add_option("--path", action_path, "CSV file with header t,x1,...,xd")->required();
    c_act->add_option("--mu", action_mu, "perturbation strength");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;  // usage error
    }

    try {
        RunConfig cfg = load_config(g);
        if (!ModelRegistry::instance().contains(cfg.model)) {
            std::cerr << "error: unknown model '" << cfg.model << "'\n";
            return 1;
        }
        if (c_eq->parsed()) return cmd_equilibria(cfg, g);
        if (c_het->parsed()) return cmd_het(cfg, g, het_mu);
        if (c_mpep->parsed()) return cmd_mpep(cfg, g, mpep_mu, mpep_svg);
        if (c_corr->parsed())
            return cmd_correction(cfg, g, mu_check > 0 ? mu_check : cfg.melnikov.fd_mu);
        if (c_sweep->parsed()) return cmd_sweep(cfg, g, sweep_svg);
        if (c_sim->parsed()) {
            if (f_eps >= 0) cfg.sde.eps = f_eps;
            if (!std::isnan(f_mu)) cfg.sde.mu = f_mu;
            if (f_n > 0) cfg.sde.n = static_cast<int>(f_n);
            if (f_seed >= 0) cfg.sde.seed = static_cast<std::uint64_t>(f_seed);
            if (f_dt > 0) cfg.sde.dt = f_dt;
            if (f_tmax > 0) cfg.sde.tmax = f_tmax;
            return cmd_simulate(cfg, g);
        }
        if (c_act->parsed()) return cmd_action(cfg, g, action_path, action_mu);
        std::cerr << "error: no subcommand\n";
        return 1;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const NonHyperbolicError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const IllPosedProblemError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const UnsupportedModelError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const InsufficientDataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ContinuationStuckError& e) {
        std::cerr << "error: " << e.what() << " (last good mu = " << e.last_good_mu << ")\n";
        return 3;
    } catch (const NoConnectionError& e) {
        std::cerr << "error: " << e.what() << " (last residual " << e.last_residual << ")\n";
        return 3;
    } catch (const NoEquilibriumError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const NearTangencyError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
