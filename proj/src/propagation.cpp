#include "cognet/propagation.hpp"

#include "cognet/rng.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace cognet {

void PropagationConfig::check() const {
    if (mode == PropagationMode::Asynchronous && poisson_rate <= 0.0)
        throw std::invalid_argument("poisson_rate must be positive in asynchronous mode");
    if (tolerance < 0.0)
        throw std::invalid_argument("tolerance must be nonnegative");
    if (max_iterations < 1)
        throw std::invalid_argument("max_iterations must be positive");
}

namespace {

void eval_into(const Network& net, const Agent& a, std::span<const double> state,
               std::vector<double>& in_buf, std::vector<double>& out_buf) {
    in_buf.resize(a.read_slots.size());
    out_buf.resize(a.write_slots.size());
    net.gather(state, a.read_slots, in_buf);
    a.evaluate(in_buf, out_buf);
}

} // namespace

std::vector<double> step_synchronous(const Network& net, std::span<const double> state,
                                     ExecPolicy exec) {
    if (static_cast<int>(state.size()) != net.state_size())
        throw SignalError("state size mismatch");
    std::vector<double> next(state.begin(), state.end());
    const int n = net.graph().vertex_count();
    if (exec == ExecPolicy::OpenMP) {
#pragma omp parallel
        {
            std::vector<double> in_buf, out_buf;
#pragma omp for schedule(static)
            for (int v = 0; v < n; ++v) {
                const Agent& a = net.agent(v);
                eval_into(net, a, state, in_buf, out_buf);
                net.scatter(next, a.write_slots, out_buf);
            }
        }
    } else {
        std::vector<double> in_buf, out_buf;
        for (int v = 0; v < n; ++v) {
            const Agent& a = net.agent(v);
            eval_into(net, a, state, in_buf, out_buf);
            net.scatter(next, a.write_slots, out_buf);
        }
    }
    return next;
}

double propagation_residual(const Network& net, std::span<const double> state,
                            ExecPolicy exec) {
    auto next = step_synchronous(net, state, exec);
    return net.state_distance(next, state);
}

namespace {

// Merged per-agent Poisson streams behind a priority queue. Each agent owns
// an RNG substream, so the merged order is a pure function of the seed.
class JumpProcess {
public:
    JumpProcess(const Network& net, double rate, std::uint64_t seed,
                std::span<const double> start)
        : net_(net), rate_(rate), state_(start.begin(), start.end()) {
        const int n = net.graph().vertex_count();
        rngs_.reserve(n);
        for (int v = 0; v < n; ++v) {
            rngs_.push_back(make_rng(seed, 0xA51C, v));
            queue_.push({next_time(v, 0.0), v});
        }
    }

    // Fires the next event if it is within the horizon.
    std::optional<AsyncEvent> advance(double horizon) {
        auto [t, v] = queue_.top();
        if (t > horizon) return std::nullopt;
        queue_.pop();
        queue_.push({next_time(v, t), v});
        fire(v);
        now_ = t;
        return AsyncEvent{t, v};
    }

    const std::vector<double>& state() const { return state_; }
    double now() const { return now_; }

private:
    double next_time(Vertex v, double from) {
        std::exponential_distribution<double> exp_dist(rate_);
        return from + exp_dist(rngs_[v]);
    }

    void fire(Vertex v) {
        const Agent& a = net_.agent(v);
        eval_into(net_, a, state_, in_buf_, out_buf_);
        net_.scatter(state_, a.write_slots, out_buf_);
    }

    const Network& net_;
    double rate_;
    std::vector<double> state_;
    std::vector<std::mt19937_64> rngs_;
    std::priority_queue<std::pair<double, Vertex>, std::vector<std::pair<double, Vertex>>,
                        std::greater<>> queue_;
    std::vector<double> in_buf_, out_buf_;
    double now_ = 0.0;
};

} // namespace

AsyncRun run_asynchronous(const Network& net, std::span<const double> start,
                          const PropagationConfig& config, double horizon,
                          bool record_states) {
    if (horizon < 0.0)
        throw std::invalid_argument("horizon must be nonnegative");
    config.check();
    AsyncRun run;
    JumpProcess jp(net, config.poisson_rate, config.rng_seed, start);
    while (auto ev = jp.advance(horizon)) {
        run.events.push_back(*ev);
        if (record_states) run.states.push_back(jp.state());
    }
    run.final_state = jp.state();
    run.cover = cover_intervals(run.events, net.graph().vertex_count(), horizon);
    return run;
}

CoverStats cover_intervals(const std::vector<AsyncEvent>& events, int n_agents,
                           double /*horizon*/) {
    CoverStats stats;
    std::vector<char> fired(n_agents, 0);
    int fired_count = 0;
    double window_start = 0.0;
    std::vector<double> lengths;
    for (const auto& ev : events) {
        if (!fired[ev.agent]) {
            fired[ev.agent] = 1;
            ++fired_count;
        }
        if (fired_count == n_agents) {
            lengths.push_back(ev.time - window_start);
            window_start = ev.time;
            std::fill(fired.begin(), fired.end(), 0);
            fired_count = 0;
        }
    }
    stats.count = static_cast<int>(lengths.size());
    if (lengths.empty()) return stats;
    double sum = 0.0;
    for (double l : lengths) sum += l;
    stats.mean = sum / lengths.size();
    std::sort(lengths.begin(), lengths.end());
    size_t mid = lengths.size() / 2;
    stats.median = (lengths.size() % 2 == 1)
                       ? lengths[mid]
                       : 0.5 * (lengths[mid - 1] + lengths[mid]);
    return stats;
}

AggregateResult solve_aggregate(const Network& net, std::span<const double> start,
                                const PropagationConfig& config) {
    config.check();
    if (net.graph().arc_count() == 0)
        throw std::invalid_argument("network has no arcs");
    if (static_cast<int>(start.size()) != net.state_size())
        throw SignalError("start state size mismatch");

    AggregateResult result;
    result.fixed_point.assign(start.begin(), start.end());

    double prev_residual = propagation_residual(net, result.fixed_point, config.exec);
    if (prev_residual <= config.tolerance) {
        result.residual = prev_residual;
        result.converged = true;
        return result;
    }

    std::optional<JumpProcess> jp;
    if (config.mode == PropagationMode::Asynchronous)
        jp.emplace(net, config.poisson_rate, config.rng_seed, start);
    const int events_per_round = std::max(1, net.graph().vertex_count());

    int growth_run = 0;
    for (int it = 1; it <= config.max_iterations; ++it) {
        if (config.mode == PropagationMode::Synchronous) {
            result.fixed_point = step_synchronous(net, result.fixed_point, config.exec);
        } else {
            for (int k = 0; k < events_per_round; ++k)
                jp->advance(std::numeric_limits<double>::infinity());
            result.fixed_point = jp->state();
        }
        double r = propagation_residual(net, result.fixed_point, config.exec);
        result.iterations_used = it;
        result.residual = r;
        if (!std::isfinite(r))
            throw DivergedError("propagation residual is not finite");
        if (r <= config.tolerance) {
            result.converged = true;
            return result;
        }
        growth_run = (r > prev_residual) ? growth_run + 1 : 0;
        if (growth_run >= config.divergence_patience)
            throw DivergedError("propagation residual grew for " +
                                std::to_string(growth_run) + " consecutive iterations");
        prev_residual = r;
    }
    return result; // budget exhausted, still shrinking
}

ContractionEstimate estimate_contraction(const Network& net, Vertex v,
                                         const PairSampler& sampler, int n,
                                         std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("sample count must be positive");
    const Agent& a = net.agent(v);
    auto rng = make_rng(seed, 0xC047, v);
    ContractionEstimate est;
    std::vector<double> fx(a.write_slots.size()), fy(a.write_slots.size());
    for (int i = 0; i < n; ++i) {
        auto [x, y] = sampler(rng);
        double din = net.slot_distance(a.read_slots, x, y);
        if (din == 0.0) continue;
        a.evaluate(x, fx);
        a.evaluate(y, fy);
        double dout = net.slot_distance(a.write_slots, fx, fy);
        est.alpha_hat = std::max(est.alpha_hat, dout / din);
        ++est.usable_samples;
    }
    if (est.usable_samples == 0)
        throw SignalError("all sampled input pairs at distance zero");
    est.contractive = est.alpha_hat < 1.0;
    return est;
}

double ConvergenceProfile::phi_hat(double t) const {
    if (t <= 0.0) return 1.0;
    if (alpha_hat <= 0.0) return 0.0;
    return std::pow(alpha_hat, t);
}

namespace {

// Least-squares slope through the origin on log ratios, then inflated until
// alpha^t majorizes every table entry.
double fit_majorant(const std::vector<double>& times, const std::vector<double>& ratios) {
    double num = 0.0, den = 0.0;
    bool any = false;
    for (size_t i = 0; i < times.size(); ++i) {
        if (times[i] <= 0.0 || ratios[i] <= 0.0) continue;
        num += times[i] * std::log(ratios[i]);
        den += times[i] * times[i];
        any = true;
    }
    if (!any) return 0.0;
    double alpha = std::exp(num / den);
    for (size_t i = 0; i < times.size(); ++i) {
        if (times[i] <= 0.0 || ratios[i] <= 0.0) continue;
        alpha = std::max(alpha, std::pow(ratios[i], 1.0 / times[i]));
    }
    return alpha;
}

} // namespace

ConvergenceProfile profile_convergence(const Network& net, std::span<const double> z,
                                       const std::vector<std::vector<double>>& starts,
                                       const PropagationConfig& config,
                                       int sync_steps, double horizon, int async_grid) {
    if (starts.empty())
        throw std::invalid_argument("profile_convergence needs at least one start");
    ConvergenceProfile profile;

    if (config.mode == PropagationMode::Synchronous) {
        profile.times.resize(sync_steps + 1);
        profile.sup_ratio.assign(sync_steps + 1, 0.0);
        for (int t = 0; t <= sync_steps; ++t) profile.times[t] = t;
        profile.sup_ratio[0] = 1.0;
        for (const auto& start : starts) {
            double d0 = net.state_distance(start, z);
            if (d0 == 0.0) continue;
            std::vector<double> x(start);
            for (int t = 1; t <= sync_steps; ++t) {
                x = step_synchronous(net, x, config.exec);
                double r = net.state_distance(x, z) / d0;
                profile.sup_ratio[t] = std::max(profile.sup_ratio[t], r);
            }
        }
    } else {
        // A single jump can transiently expand the distance (one event
        // rewrites one agent's arcs), so the table samples each trajectory at
        // its own cover-completion times, where the per-interval contraction
        // argument applies.
        double lam = config.poisson_rate;
        int n = net.graph().vertex_count();
        double med = -std::log(1.0 - std::pow(2.0, -1.0 / n)) / lam;
        if (horizon <= 0.0) horizon = std::max(1, async_grid / 4) * med;
        std::vector<std::pair<double, double>> points{{0.0, 1.0}};
        for (size_t i = 0; i < starts.size(); ++i) {
            double d0 = net.state_distance(starts[i], z);
            if (d0 == 0.0) continue;
            PropagationConfig sub = config;
            sub.rng_seed = substream(config.rng_seed, 0xF00D, i);
            auto run = run_asynchronous(net, starts[i], sub, horizon, true);
            if (i == 0) profile.cover = run.cover;
            std::vector<char> fired(n, 0);
            int fired_count = 0;
            for (size_t k = 0; k < run.events.size(); ++k) {
                if (!fired[run.events[k].agent]) {
                    fired[run.events[k].agent] = 1;
                    ++fired_count;
                }
                if (fired_count == n) {
                    double r = net.state_distance(run.states[k], z) / d0;
                    points.push_back({run.events[k].time, r});
                    std::fill(fired.begin(), fired.end(), 0);
                    fired_count = 0;
                }
            }
        }
        std::sort(points.begin(), points.end());
        for (const auto& [t, r] : points) {
            profile.times.push_back(t);
            profile.sup_ratio.push_back(r);
        }
    }
    profile.alpha_hat = fit_majorant(profile.times, profile.sup_ratio);
    return profile;
}

} // namespace cognet
