#include "mpep/heteroclinic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mpep/errors.hpp"
#include "mpep/ode.hpp"

namespace mpep {

AutonomousSystem forward_drift_system(const VectorFieldModel& model, double mu) {
    AutonomousSystem s;
    s.dim = model.n;
    s.rhs = [model, mu](const Vec& x) { return drift(model, x, mu); };
    s.jac = [model, mu](const Vec& x) { return drift_jacobian(model, x, mu); };
    return s;
}

AutonomousSystem reversed_drift_system(const VectorFieldModel& model, double mu) {
    AutonomousSystem s;
    s.dim = model.n;
    s.rhs = [model, mu](const Vec& x) { return Vec(-drift(model, x, mu)); };
    s.jac = [model, mu](const Vec& x) { return Mat(-drift_jacobian(model, x, mu)); };
    return s;
}

AutonomousSystem as_autonomous(const ElSystem& el) {
    AutonomousSystem s;
    s.dim = el.dim();
    s.rhs = [el](const Vec& z) { return el.rhs(z); };
    s.jac = [el](const Vec& z) { return el.rhs_jac(z); };
    s.invariant_gradient = [el](const Vec& z) { return el.invariant_gradient(z); };
    return s;
}

PhaseCondition PhaseCondition::anchor(int coord, double value) {
    PhaseCondition p;
    p.kind = Kind::CoordinateAnchor;
    p.coord = coord;
    p.value = value;
    return p;
}

PhaseCondition PhaseCondition::integral(Path reference) {
    PhaseCondition p;
    p.kind = Kind::IntegralAgainstReference;
    p.reference = std::move(reference);
    return p;
}

std::string PhaseCondition::describe() const {
    std::ostringstream os;
    if (kind == Kind::CoordinateAnchor)
        os << "coordinate anchor: x" << (coord + 1) << "(t_mid) = " << value;
    else
        os << "integral condition against reference solution";
    return os.str();
}

namespace {

std::vector<double> uniform_mesh(double T, int n_intervals) {
    std::vector<double> t(static_cast<std::size_t>(n_intervals) + 1);
    for (int i = 0; i <= n_intervals; ++i)
        t[static_cast<std::size_t>(i)] = -T + 2.0 * T * i / n_intervals;
    return t;
}

// Projection boundary rows: the left endpoint offset must lie in the
// unstable subspace of from_eq, the right one in the stable subspace of
// to_eq; each contributes the orthonormal complement of the subspace.
std::vector<BoundaryRow> projection_rows(const Equilibrium& from_eq, const Equilibrium& to_eq) {
    std::vector<BoundaryRow> rows;
    const Mat cl = orthonormal_complement(from_eq.unstable_basis);
    for (int c = 0; c < cl.cols(); ++c) {
        BoundaryRow r;
        r.end = BoundaryRow::End::Left;
        r.coeffs = cl.col(c);
        r.value = cl.col(c).dot(from_eq.location);
        rows.push_back(std::move(r));
    }
    const Mat cr = orthonormal_complement(to_eq.stable_basis);
    for (int c = 0; c < cr.cols(); ++c) {
        BoundaryRow r;
        r.end = BoundaryRow::End::Right;
        r.coeffs = cr.col(c);
        r.value = cr.col(c).dot(to_eq.location);
        rows.push_back(std::move(r));
    }
    return rows;
}

MeshRow phase_row(const AutonomousSystem& sys, const PhaseCondition& phase,
                  const std::vector<double>& tmesh, int n_params) {
    const int d = sys.dim;
    const int npts = static_cast<int>(tmesh.size());
    MeshRow row;
    row.weights = Mat::Zero(npts, d);
    if (n_params > 0) row.param_weights = Vec::Zero(n_params);
    if (phase.kind == PhaseCondition::Kind::CoordinateAnchor) {
        row.weights((npts - 1) / 2, phase.coord) = 1.0;
        row.value = phase.value;
        return row;
    }
    const std::vector<double> w = trapezoid_weights(tmesh);
    double val = 0.0;
    for (int i = 0; i < npts; ++i) {
        const Vec ref = phase.reference.interpolate(tmesh[static_cast<std::size_t>(i)]);
        const Vec dref = sys.rhs(ref);
        row.weights.row(i) = w[static_cast<std::size_t>(i)] * dref.transpose();
        val += w[static_cast<std::size_t>(i)] * dref.dot(ref);
    }
    row.value = val;
    return row;
}

}  // namespace

Path HeteroclinicSolution::resample(int n_points) const {
    Path p;
    p.times.resize(static_cast<std::size_t>(n_points));
    p.states = Mat(n_points, path.dim());
    const double t0 = path.times.front(), t1 = path.times.back();
    for (int i = 0; i < n_points; ++i) {
        const double t = t0 + (t1 - t0) * i / (n_points - 1);
        p.times[static_cast<std::size_t>(i)] = t;
        p.states.row(i) = eval(t).transpose();
    }
    return p;
}

HeteroclinicSolution solve_heteroclinic(const AutonomousSystem& sys,
                                        const Equilibrium& from_eq,
                                        const Equilibrium& to_eq,
                                        const BvpConfig& cfg, const Path& initial_guess,
                                        const PhaseCondition& phase, double mu_label) {
    const int d = sys.dim;
    if (from_eq.dim() != d || to_eq.dim() != d)
        throw std::invalid_argument("solve_heteroclinic: equilibrium dimension mismatch");
    if (from_eq.unstable_dim < 1)
        throw IllPosedProblemError("solve_heteroclinic: departure equilibrium has no unstable direction");

    const int n_bc = (d - from_eq.unstable_dim) + (d - to_eq.stable_dim);
    const int n_free = n_bc + 1 - d;  // side conditions beyond the generic count
    if (n_free < 0 || n_free > 1)
        throw IllPosedProblemError("solve_heteroclinic: boundary/phase condition count " +
                                   std::to_string(n_bc + 1) + " incompatible with dimension " +
                                   std::to_string(d));
    if (n_free == 1 && !sys.invariant_gradient)
        throw IllPosedProblemError(
            "solve_heteroclinic: over-determined projection conditions require an "
            "invariant gradient for unfolding");

    CollocationSystem csys;
    csys.dim = d;
    csys.n_params = n_free;
    if (n_free == 0) {
        csys.rhs = [&sys](double, const Vec& z, const Vec&) { return sys.rhs(z); };
        csys.jac_z = [&sys](double, const Vec& z, const Vec&) { return sys.jac(z); };
    } else {
        csys.rhs = [&sys](double, const Vec& z, const Vec& p) {
            return Vec(sys.rhs(z) + p(0) * sys.invariant_gradient(z));
        };
        // the |p| * Hessian(invariant) term is dropped; p vanishes on the
        // converged connection so Newton still contracts
        csys.jac_z = [&sys](double, const Vec& z, const Vec&) { return sys.jac(z); };
        csys.jac_p = [&sys](double, const Vec& z, const Vec&) {
            return Mat(sys.invariant_gradient(z));
        };
    }

    double T = cfg.T;
    int mesh_n = cfg.mesh;
    Path guess = initial_guess;
    CollocationOptions copts;
    copts.newton_tol = cfg.newton_tol;
    copts.max_newton = cfg.max_newton;

    for (;;) {
        const std::vector<double> tmesh = uniform_mesh(T, mesh_n);
        Mat gs(mesh_n + 1, d);
        for (int i = 0; i <= mesh_n; ++i)
            gs.row(i) = guess.interpolate(tmesh[static_cast<std::size_t>(i)]).transpose();

        std::vector<BoundaryRow> brows = projection_rows(from_eq, to_eq);
        std::vector<MeshRow> mrows{phase_row(sys, phase, tmesh, n_free)};

        CollocationResult res = solve_collocation(csys, tmesh, gs, Vec::Zero(n_free), brows,
                                                  mrows, copts);

        const double left_defect = (res.states.row(0).transpose() - from_eq.location).norm();
        const double right_defect = (res.states.row(mesh_n).transpose() - to_eq.location).norm();
        if ((left_defect > cfg.endpoint_tol || right_defect > cfg.endpoint_tol) && 2 * T <= cfg.T_max) {
            // truncation interval too short; double it and reseed
            guess = res.to_path();
            T *= 2.0;
            mesh_n *= 2;
            continue;
        }
        if (left_defect > cfg.endpoint_tol || right_defect > cfg.endpoint_tol)
            throw NoConnectionError("solve_heteroclinic: endpoint defect " +
                                        std::to_string(std::max(left_defect, right_defect)) +
                                        " above tolerance at T_max",
                                    res.residual_norm);

        HeteroclinicSolution sol;
        sol.path = res.to_path();
        sol.T = T;
        sol.from_eq = from_eq;
        sol.to_eq = to_eq;
        sol.mu = mu_label;
        sol.residual_norm = res.residual_norm;
        sol.newton_iters = res.newton_iters;
        sol.mesh = sol.path.times;
        sol.phase_anchor = phase.describe();
        sol.unfolding = n_free == 1 ? res.params(0) : 0.0;
        sol.condition_estimate = res.condition_estimate;
        sol.near_tangency = std::isfinite(res.condition_estimate) && res.condition_estimate > 1e12;
        sol.rep = std::move(res);
        return sol;
    }
}

std::vector<HeteroclinicSolution> continue_in_mu(const SystemFamily& family,
                                                 const HeteroclinicSolution& base,
                                                 const std::vector<double>& mu_targets,
                                                 const BvpConfig& cfg) {
    std::vector<HeteroclinicSolution> out;
    out.reserve(mu_targets.size());
    HeteroclinicSolution current = base;

    EquilibriumOptions eq_opts;
    eq_opts.hyperbolicity_tol = cfg.hyperbolicity_tol;

    for (double target : mu_targets) {
        double step = std::min(std::abs(target - current.mu), 0.05);
        while (current.mu != target) {
            const double direction = target > current.mu ? 1.0 : -1.0;
            double mu_next = current.mu + direction * step;
            if ((direction > 0 && mu_next >= target) || (direction < 0 && mu_next <= target))
                mu_next = target;
            try {
                const AutonomousSystem sys = family.system(mu_next);
                const Equilibrium from_eq =
                    refine_equilibrium(sys.rhs, sys.jac, current.from_eq.location, eq_opts);
                const Equilibrium to_eq =
                    refine_equilibrium(sys.rhs, sys.jac, current.to_eq.location, eq_opts);
                BvpConfig step_cfg = cfg;
                step_cfg.T = current.T;  // keep the (possibly widened) interval
                step_cfg.mesh = static_cast<int>(current.path.times.size()) - 1;
                HeteroclinicSolution next =
                    solve_heteroclinic(sys, from_eq, to_eq, step_cfg, current.path,
                                       PhaseCondition::integral(current.path), mu_next);
                current = std::move(next);
                step = std::min(step * 2.0, 0.05);
            } catch (const NoConnectionError&) {
                step *= 0.5;
                if (step < 1e-8)
                    throw ContinuationStuckError(
                        "continuation stuck at mu = " + std::to_string(current.mu), current.mu);
            }
        }
        out.push_back(current);
    }
    return out;
}

Path heteroclinic_guess(const VectorFieldModel& model, double mu, const BvpConfig& cfg,
                        const Equilibrium& saddle, const Equilibrium& attractor,
                        bool reversed) {
    // the forward flow leaves the saddle along its one-dimensional unstable
    // manifold and settles at the attractor; shoot it once and lay the
    // samples onto [-T, T]
    Vec dir = saddle.unstable_basis.col(0);
    if (dir.dot(attractor.location - saddle.location) < 0.0) dir = -dir;
    const Vec x0 = saddle.location + cfg.bc_offset * dir;

    const AutonomousSystem fwd = forward_drift_system(model, mu);
    IntegrationOptions iopts;
    iopts.abs_tol = 1e-12;
    iopts.rel_tol = 1e-12;
    iopts.h_max = 0.25;
    const Vec target = attractor.location;
    Trajectory traj = integrate(
        fwd.rhs, x0, 0.0, 20.0 * cfg.T + 100.0, iopts,
        [&target](double, const Vec& x) { return (x - target).norm() < 1e-10; });

    // anchor the parameterization at the point of maximal speed
    double t_star = traj.times.front();
    double best = -1.0;
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const double speed = fwd.rhs(traj.states[i]).norm();
        if (speed > best) {
            best = speed;
            t_star = traj.times[i];
        }
    }

    const int n = cfg.mesh;
    Path guess;
    guess.times.resize(static_cast<std::size_t>(n) + 1);
    guess.states = Mat(n + 1, model.n);
    for (int i = 0; i <= n; ++i) {
        const double t = -cfg.T + 2.0 * cfg.T * i / n;
        guess.times[static_cast<std::size_t>(i)] = t;
        const double tau = reversed ? t_star - t : t_star + t;
        guess.states.row(i) = traj.sample(tau).transpose();
    }
    return guess;
}

namespace {

HeteroclinicSolution solve_deterministic(const VectorFieldModel& model, double mu,
                                         const BvpConfig& cfg, const Vec& saddle_guess,
                                         const Vec& attractor_guess, bool reversed) {
    const AutonomousSystem fwd = forward_drift_system(model, mu);
    EquilibriumOptions eq_opts;
    eq_opts.hyperbolicity_tol = cfg.hyperbolicity_tol;
    const Equilibrium saddle_f = refine_equilibrium(fwd.rhs, fwd.jac, saddle_guess, eq_opts);
    const Equilibrium attractor_f = refine_equilibrium(fwd.rhs, fwd.jac, attractor_guess, eq_opts);
    if (saddle_f.unstable_dim != 1)
        throw IllPosedProblemError("expected a saddle with one unstable direction, got " +
                                   std::to_string(saddle_f.unstable_dim));

    const Path guess = heteroclinic_guess(model, mu, cfg, saddle_f, attractor_f, reversed);
    const int mid_coord = 0;
    const PhaseCondition phase =
        PhaseCondition::anchor(mid_coord, guess.states((guess.states.rows() - 1) / 2, mid_coord));

    if (!reversed)
        return solve_heteroclinic(fwd, saddle_f, attractor_f, cfg, guess, phase, mu);

    const AutonomousSystem rev = reversed_drift_system(model, mu);
    const Equilibrium attractor_r = refine_equilibrium(rev.rhs, rev.jac, attractor_guess, eq_opts);
    const Equilibrium saddle_r = refine_equilibrium(rev.rhs, rev.jac, saddle_guess, eq_opts);
    return solve_heteroclinic(rev, attractor_r, saddle_r, cfg, guess, phase, mu);
}

}  // namespace

HeteroclinicSolution solve_reversed_heteroclinic(const VectorFieldModel& model, double mu,
                                                 const BvpConfig& cfg,
                                                 const Vec& attractor_guess,
                                                 const Vec& saddle_guess) {
    return solve_deterministic(model, mu, cfg, saddle_guess, attractor_guess, /*reversed=*/true);
}

HeteroclinicSolution solve_forward_heteroclinic(const VectorFieldModel& model, double mu,
                                                const BvpConfig& cfg, const Vec& saddle_guess,
                                                const Vec& attractor_guess) {
    return solve_deterministic(model, mu, cfg, saddle_guess, attractor_guess, /*reversed=*/false);
}

MpepResult most_probable_escape_path(const VectorFieldModel& model, double mu,
                                     const BvpConfig& cfg, const Vec& attractor_guess,
                                     const Vec& saddle_guess) {
    validate_base_symmetry(model);

    MpepResult out;
    const HeteroclinicSolution base_rev =
        solve_reversed_heteroclinic(model, 0.0, cfg, attractor_guess, saddle_guess);

    // continue the deterministic connection to the requested mu with the same
    // phase reference, so the gap against the escape path is parameterization
    // consistent
    if (mu == 0.0) {
        out.reversed_het = base_rev;
    } else {
        SystemFamily rev_family{
            [model](double m) { return reversed_drift_system(model, m); }};
        out.reversed_het = continue_in_mu(rev_family, base_rev, {mu}, cfg).front();
    }

    // lift the mu = 0 reversed connection to the V-form phase space
    const int n = model.n;
    const ElSystem el0 = assemble_v_form(model, 0.0);
    const AutonomousSystem sys0 = as_autonomous(el0);
    EquilibriumOptions eq_opts;
    eq_opts.hyperbolicity_tol = cfg.hyperbolicity_tol;
    Vec from_guess(2 * n), to_guess(2 * n);
    from_guess << base_rev.from_eq.location, Vec::Zero(n);
    to_guess << base_rev.to_eq.location, Vec::Zero(n);
    const Equilibrium from0 = refine_equilibrium(sys0.rhs, sys0.jac, from_guess, eq_opts);
    const Equilibrium to0 = refine_equilibrium(sys0.rhs, sys0.jac, to_guess, eq_opts);

    Path lifted;
    lifted.times = base_rev.path.times;
    lifted.states = Mat::Zero(static_cast<Eigen::Index>(lifted.times.size()), 2 * n);
    lifted.states.leftCols(n) = base_rev.path.states;

    BvpConfig el_cfg = cfg;
    el_cfg.T = base_rev.T;
    el_cfg.mesh = static_cast<int>(base_rev.path.times.size()) - 1;
    HeteroclinicSolution el_base = solve_heteroclinic(
        sys0, from0, to0, el_cfg, lifted, PhaseCondition::integral(lifted), 0.0);

    if (mu != 0.0) {
        SystemFamily family{[model](double m) { return as_autonomous(assemble_v_form(model, m)); }};
        el_base = continue_in_mu(family, el_base, {mu}, el_cfg).front();
    }

    out.el_solution = std::move(el_base);
    Path escape;
    escape.times = out.el_solution.path.times;
    escape.states = out.el_solution.path.states.leftCols(n);
    out.escape_path = std::move(escape);
    return out;
}

}  // namespace mpep
