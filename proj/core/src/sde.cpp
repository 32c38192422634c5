#include "mpep/sde.hpp"

#include <algorithm>
#include <atomic>
#include <cstring>
#include <cmath>
#include <optional>
#include <thread>

#include "mpep/errors.hpp"
#include "mpep/philox.hpp"

namespace mpep {

ExitRule ExitRule::hyperplane(Vec normal, double offset) {
    ExitRule r;
    r.kind = Kind::Hyperplane;
    r.normal = std::move(normal);
    r.offset = offset;
    return r;
}

ExitRule ExitRule::saddle_ball(Vec center, double radius) {
    ExitRule r;
    r.kind = Kind::SaddleBall;
    r.center = std::move(center);
    r.radius = radius;
    return r;
}

bool ExitRule::triggered(const Vec& x) const {
    if (kind == Kind::Hyperplane) return normal.dot(x) >= offset;
    return (x - center).norm() <= radius;
}

double ExitRule::crossing_fraction(const Vec& prev, const Vec& next) const {
    if (kind == Kind::Hyperplane) {
        const double s0 = normal.dot(prev) - offset;
        const double s1 = normal.dot(next) - offset;
        if (s1 == s0) return 1.0;
        return std::clamp(-s0 / (s1 - s0), 0.0, 1.0);
    }
    const double r0 = (prev - center).norm() - radius;
    const double r1 = (next - center).norm() - radius;
    if (r1 == r0) return 1.0;
    return std::clamp(r0 / (r0 - r1), 0.0, 1.0);
}

namespace {

struct PathOutcome {
    std::optional<EscapeEvent> exit;
};

PathOutcome simulate_one(const VectorFieldModel& model, const SimConfig& cfg, int path_id) {
    const int n = model.n;
    GaussianStream noise(cfg.seed, static_cast<std::uint64_t>(path_id));

    const double sq_dt = std::sqrt(cfg.dt);
    const double noise_scale = cfg.eps * sq_dt;
    const long n_steps = static_cast<long>(cfg.t_max / cfg.dt);
    const long stride = std::max(1L, std::lround(cfg.segment_resolution / cfg.dt));

    std::vector<double> xbuf(static_cast<std::size_t>(3 * n));
    double* x = xbuf.data();
    double* xp = x + n;
    double* dr = xp + n;
    for (int i = 0; i < n; ++i) x[i] = cfg.start(i);

    const bool raw = static_cast<bool>(model.drift_raw);
    Vec x_vec = cfg.start;  // generic evaluation path only

    // hoisted exit-rule and eta-ball parameters
    const bool plane = cfg.exit_rule.kind == ExitRule::Kind::Hyperplane;
    std::vector<double> rule(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        rule[static_cast<std::size_t>(i)] = plane ? cfg.exit_rule.normal(i) : cfg.exit_rule.center(i);
    const double* rp = rule.data();
    const double plane_offset = cfg.exit_rule.offset;
    const double ball_r2 = cfg.exit_rule.radius * cfg.exit_rule.radius;
    std::vector<double> start(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) start[static_cast<std::size_t>(i)] = cfg.start(i);
    const double* sp = start.data();
    const double eta2 = cfg.eta * cfg.eta;

    // escape segment, sampled every `stride` steps while outside the
    // eta-ball and reset whenever the path comes back inside
    std::vector<double> seg_times;
    std::vector<double> seg_states;
    auto seg_push = [&](double t, const double* s) {
        seg_times.push_back(t);
        seg_states.insert(seg_states.end(), s, s + n);
    };

    for (long k = 0; k < n_steps; ++k) {
        std::memcpy(xp, x, static_cast<std::size_t>(n) * sizeof(double));
        if (raw) {
            model.drift_raw(x, cfg.mu, dr);
        } else {
            for (int i = 0; i < n; ++i) x_vec(i) = x[i];
            const Vec d = drift(model, x_vec, cfg.mu);
            for (int i = 0; i < n; ++i) dr[i] = d(i);
        }
        for (int i = 0; i < n; ++i) x[i] += dr[i] * cfg.dt + noise_scale * noise.next();

        bool hit;
        if (plane) {
            double s = -plane_offset;
            for (int i = 0; i < n; ++i) s += rp[i] * x[i];
            hit = s >= 0.0;
        } else {
            double r2 = 0.0;
            for (int i = 0; i < n; ++i) {
                const double di = x[i] - rp[i];
                r2 += di * di;
            }
            hit = r2 <= ball_r2;
        }
        if (hit) {
            Vec prev(n), next(n);
            for (int i = 0; i < n; ++i) {
                prev(i) = xp[i];
                next(i) = x[i];
            }
            const double theta = cfg.exit_rule.crossing_fraction(prev, next);
            EscapeEvent ev;
            ev.path_id = path_id;
            ev.exit_time = (static_cast<double>(k) + theta) * cfg.dt;
            ev.exit_location = prev + theta * (next - prev);

            if (!seg_times.empty() && ev.exit_time <= seg_times.back()) {
                seg_times.pop_back();
                seg_states.resize(seg_states.size() - static_cast<std::size_t>(n));
            }
            seg_push(ev.exit_time, ev.exit_location.data());
            Path seg;
            seg.times = std::move(seg_times);
            seg.states = Mat(static_cast<Eigen::Index>(seg.times.size()), n);
            for (std::size_t r = 0; r < seg.times.size(); ++r)
                for (int i = 0; i < n; ++i)
                    seg.states(static_cast<Eigen::Index>(r), i) =
                        seg_states[r * static_cast<std::size_t>(n) + static_cast<std::size_t>(i)];
            ev.escape_segment = std::move(seg);
            return PathOutcome{std::move(ev)};
        }

        // segment bookkeeping
        double dist2 = 0.0;
        for (int i = 0; i < n; ++i) {
            const double di = x[i] - sp[i];
            dist2 += di * di;
        }
        if (dist2 <= eta2) {
            if (!seg_times.empty()) {
                seg_times.clear();
                seg_states.clear();
            }
        } else if (seg_times.empty()) {
            seg_push(static_cast<double>(k) * cfg.dt, xp);  // last state inside
        } else if (k % stride == 0) {
            seg_push((static_cast<double>(k) + 1.0) * cfg.dt, x);
        }
    }
    return PathOutcome{};
}

}  // namespace

EscapeEnsemble simulate(const VectorFieldModel& model, const SimConfig& cfg, int n_threads) {
    if (cfg.start.size() != model.n)
        throw std::invalid_argument("simulate: start dimension does not match the model");
    if (cfg.n_paths < 1 || cfg.dt <= 0.0 || cfg.dt > cfg.t_max)
        throw std::invalid_argument("simulate: invalid dt/t_max/n_paths");
    if (cfg.exit_rule.kind == ExitRule::Kind::Hyperplane && cfg.exit_rule.normal.size() != model.n)
        throw std::invalid_argument("simulate: exit rule dimension mismatch");

    std::vector<PathOutcome> outcomes(static_cast<std::size_t>(cfg.n_paths));
    n_threads = std::max(1, n_threads);
    if (n_threads == 1) {
        for (int p = 0; p < cfg.n_paths; ++p)
            outcomes[static_cast<std::size_t>(p)] = simulate_one(model, cfg, p);
    } else {
        std::vector<std::thread> pool;
        std::atomic<int> next_path{0};
        for (int t = 0; t < n_threads; ++t)
            pool.emplace_back([&] {
                for (;;) {
                    const int p = next_path.fetch_add(1);
                    if (p >= cfg.n_paths) return;
                    outcomes[static_cast<std::size_t>(p)] = simulate_one(model, cfg, p);
                }
            });
        for (auto& th : pool) th.join();
    }

    EscapeEnsemble ens;
    ens.config = cfg;
    ens.n_no_exit = 0;
    for (auto& o : outcomes) {
        if (o.exit)
            ens.exits.push_back(std::move(*o.exit));
        else
            ++ens.n_no_exit;
    }
    return ens;
}

ExitStatistics exit_statistics(const EscapeEnsemble& ens) {
    const auto& exits = ens.exits;
    if (exits.empty()) throw InsufficientDataError("exit_statistics: ensemble has no exits");
    ExitStatistics st;
    st.n_exits = static_cast<int>(exits.size());
    st.n_no_exit = ens.n_no_exit;

    std::vector<double> times;
    times.reserve(exits.size());
    const int n = static_cast<int>(exits.front().exit_location.size());
    st.exit_location_mean = Vec::Zero(n);
    for (const auto& e : exits) {
        times.push_back(e.exit_time);
        st.exit_location_mean += e.exit_location;
    }
    st.exit_location_mean /= static_cast<double>(exits.size());
    st.mean_exit_time = 0.0;
    for (double t : times) st.mean_exit_time += t;
    st.mean_exit_time /= static_cast<double>(times.size());

    std::sort(times.begin(), times.end());
    const std::size_t m = times.size();
    st.median_exit_time = m % 2 ? times[m / 2] : 0.5 * (times[m / 2 - 1] + times[m / 2]);

    st.exit_location_cov = Mat::Zero(n, n);
    if (m > 1) {
        for (const auto& e : exits) {
            const Vec d = e.exit_location - st.exit_location_mean;
            st.exit_location_cov += d * d.transpose();
        }
        st.exit_location_cov /= static_cast<double>(m - 1);
    }
    st.eps_log_mean_time = ens.config.eps * std::log(st.mean_exit_time);
    st.eps_sq_log_mean_time = ens.config.eps * ens.config.eps * std::log(st.mean_exit_time);
    return st;
}

Path empirical_mpep(const EscapeEnsemble& ens, int n_anchor) {
    if (ens.exits.size() < 50)
        throw InsufficientDataError("empirical_mpep: need at least 50 exits, have " +
                                    std::to_string(ens.exits.size()));
    if (n_anchor < 2) throw std::invalid_argument("empirical_mpep: n_anchor must be >= 2");
    const int n = static_cast<int>(ens.exits.front().exit_location.size());

    Mat mean = Mat::Zero(n_anchor, n);
    int used = 0;
    for (const auto& e : ens.exits) {
        const Path& seg = e.escape_segment;
        if (seg.size() < 2) continue;
        // normalized-arclength resampling
        std::vector<double> arc(seg.size(), 0.0);
        for (std::size_t i = 1; i < seg.size(); ++i)
            arc[i] = arc[i - 1] + (seg.state(i) - seg.state(i - 1)).norm();
        const double total = arc.back();
        if (total <= 0.0) continue;
        std::size_t j = 0;
        for (int a = 0; a < n_anchor; ++a) {
            const double s = total * a / (n_anchor - 1);
            while (j + 1 < seg.size() && arc[j + 1] < s) ++j;
            const double span = arc[j + 1] - arc[j];
            const double w = span > 0.0 ? (s - arc[j]) / span : 0.0;
            mean.row(a) += ((1.0 - w) * seg.state(j) + w * seg.state(j + 1)).transpose();
        }
        ++used;
    }
    if (used < 50)
        throw InsufficientDataError("empirical_mpep: fewer than 50 usable escape segments");
    mean /= static_cast<double>(used);

    Path out;
    out.times.resize(static_cast<std::size_t>(n_anchor));
    for (int a = 0; a < n_anchor; ++a)
        out.times[static_cast<std::size_t>(a)] = static_cast<double>(a) / (n_anchor - 1);
    out.states = std::move(mean);
    return out;
}

}  // namespace mpep
