#include "cognet/pattern.hpp"

#include "cognet/rng.hpp"

#include <algorithm>
#include <cmath>

namespace cognet {

void PatternConfig::check() const {
    if (lipschitz_L < 0.0) throw std::invalid_argument("lipschitz_L must be >= 0");
    if (delta <= 0.0) throw std::invalid_argument("delta must be positive");
    if (candidate_count < 1) throw std::invalid_argument("candidate_count must be >= 1");
    if (probe.count < 1) throw std::invalid_argument("probe count must be >= 1");
}

std::vector<std::vector<double>> ProbeSpec::inputs(int in_width, Vertex v) const {
    if (count < 1) throw std::invalid_argument("probe count must be >= 1");
    std::vector<std::vector<double>> probes;
    probes.reserve(count);
    probes.emplace_back(in_width, lo);
    if (count > 1) probes.emplace_back(in_width, hi);
    auto rng = make_rng(seed, 0xD157, v);
    std::uniform_real_distribution<double> uni(lo, hi);
    while (static_cast<int>(probes.size()) < count) {
        std::vector<double> p(in_width);
        for (double& x : p) x = uni(rng);
        probes.push_back(std::move(p));
    }
    return probes;
}

AgentStates snapshot_states(const Network& net) {
    AgentStates states(net.graph().vertex_count());
    for (int v = 0; v < net.graph().vertex_count(); ++v)
        states[v] = net.agent(v).params;
    return states;
}

void apply_states(Network& net, const AgentStates& states) {
    for (int v = 0; v < net.graph().vertex_count(); ++v)
        net.agent(v).params = states[v];
}

namespace {

double probe_distance(const Network& net, const Agent& a,
                      const std::vector<std::vector<double>>& probes,
                      std::span<const double> theta_f, std::span<const double> theta_g) {
    std::vector<double> out_f(a.write_slots.size()), out_g(a.write_slots.size());
    double worst = 0.0;
    for (const auto& p : probes) {
        a.evaluate_with(theta_f, p, out_f);
        a.evaluate_with(theta_g, p, out_g);
        worst = std::max(worst, net.slot_distance(a.write_slots, out_f, out_g));
    }
    return worst;
}

} // namespace

double state_distance(const Network& net, Vertex v, std::span<const double> theta_f,
                      std::span<const double> theta_g, const ProbeSpec& probe) {
    const Agent& a = net.agent(v);
    return probe_distance(net, a, probe.inputs(a.in_width(), v), theta_f, theta_g);
}

double network_distance(const Network& net, const AgentStates& f, const AgentStates& g,
                        const ProbeSpec& probe) {
    const int n = net.graph().vertex_count();
    if (static_cast<int>(f.size()) != n || static_cast<int>(g.size()) != n)
        throw std::invalid_argument("state vectors must cover every vertex");
    double total = 0.0;
    for (int v = 0; v < n; ++v) {
        if (net.agent(v).frozen) continue;
        total += state_distance(net, v, f[v], g[v], probe);
    }
    return total / n;
}

std::vector<double> greedy_step(const Network& net, Vertex v,
                                std::span<const double> theta,
                                std::span<const double> z_in, double budget,
                                int candidates, std::uint64_t seed,
                                const ProbeSpec& probe) {
    if (budget < 0.0) throw std::invalid_argument("budget must be >= 0");
    const Agent& a = net.agent(v);
    std::vector<double> incumbent(theta.begin(), theta.end());
    if (budget == 0.0 || !a.has_utility() || theta.empty()) return incumbent;

    auto probes = probe.inputs(a.in_width(), v);
    const int dims = static_cast<int>(theta.size());

    // Scale a direction into the d_v ball; halve on overshoot until inside.
    auto make_candidate = [&](const std::vector<double>& dir) {
        std::vector<double> cand(incumbent);
        double d1 = 0.0;
        {
            std::vector<double> probe_pt(incumbent);
            for (int k = 0; k < dims; ++k) probe_pt[k] += dir[k];
            d1 = probe_distance(net, a, probes, incumbent, probe_pt);
        }
        double s = (d1 > 0.0) ? budget / d1 : 1.0;
        for (int tries = 0; tries < 48; ++tries) {
            for (int k = 0; k < dims; ++k) cand[k] = incumbent[k] + s * dir[k];
            a.clamp_params(cand);
            double d = probe_distance(net, a, probes, incumbent, cand);
            if (d <= budget * (1.0 + 1e-9)) return cand;
            s *= 0.5;
        }
        return incumbent;
    };

    std::vector<std::vector<double>> pool;
    pool.push_back(incumbent);
    for (int k = 0; k < dims && static_cast<int>(pool.size()) < 1 + 2 * dims; ++k) {
        std::vector<double> dir(dims, 0.0);
        dir[k] = 1.0;
        pool.push_back(make_candidate(dir));
        dir[k] = -1.0;
        pool.push_back(make_candidate(dir));
    }
    auto rng = make_rng(seed, 0x6EED, v);
    std::normal_distribution<double> gauss(0.0, 1.0);
    while (static_cast<int>(pool.size()) < candidates + 1) {
        std::vector<double> dir(dims);
        double norm = 0.0;
        for (double& x : dir) {
            x = gauss(rng);
            norm += x * x;
        }
        norm = std::sqrt(norm);
        if (norm == 0.0) continue;
        for (double& x : dir) x /= norm;
        pool.push_back(make_candidate(dir));
    }

    std::vector<double> out(a.write_slots.size());
    double best_q = 0.0;
    int best = -1;
    for (size_t i = 0; i < pool.size(); ++i) {
        a.evaluate_with(pool[i], z_in, out);
        double q = a.utility(z_in, out);
        if (best < 0 || q > best_q) {
            best_q = q;
            best = static_cast<int>(i);
        }
    }
    return pool[best];
}

AgentStates pattern_step(const Network& net, const PatternConfig& config,
                         std::span<const double> z_state, std::uint64_t step_index) {
    config.check();
    const int n = net.graph().vertex_count();
    AgentStates next = snapshot_states(net);
    const double budget = config.lipschitz_L * config.delta;
    if (budget == 0.0) return next;

    auto update_one = [&](int v) {
        const Agent& a = net.agent(v);
        if (a.frozen || !a.has_utility() || a.params.empty()) return;
        std::vector<double> z_in(a.read_slots.size());
        net.gather(z_state, a.read_slots, z_in);
        next[v] = greedy_step(net, v, a.params, z_in, budget, config.candidate_count,
                              substream(config.rng_seed, 0x57E9, step_index, v),
                              config.probe);
    };

    if (config.exec == ExecPolicy::OpenMP) {
#pragma omp parallel for schedule(dynamic)
        for (int v = 0; v < n; ++v) update_one(v);
    } else {
        for (int v = 0; v < n; ++v) update_one(v);
    }
    return next;
}

double SafeStep::epsilon_at(double delta) const {
    if (ml == 0.0) return 0.0;
    if (alpha_hat <= 0.0) return 2.0 * ml * delta;
    double denom = 1.0 - std::pow(alpha_hat, delta);
    return 2.0 * ml * delta / denom;
}

SafeStep max_safe_step(double m_lipschitz, double state_speed,
                       const ConvergenceProfile& profile) {
    SafeStep out;
    out.ml = m_lipschitz * state_speed;
    out.alpha_hat = profile.alpha_hat;
    if (profile.alpha_hat >= 1.0)
        throw std::invalid_argument("profile alpha_hat must be < 1");
    if (out.ml == 0.0) {
        out.delta_max = std::numeric_limits<double>::infinity();
        out.epsilon_limit = 0.0;
        return out;
    }
    if (profile.alpha_hat <= 0.0) {
        out.delta_max = std::numeric_limits<double>::infinity();
        out.epsilon_limit = 0.0;
        return out;
    }
    double decay0 = -std::log(profile.alpha_hat); // -dphi/dt at t=0
    if (out.ml >= decay0)
        throw NoSafeStepError("pattern dynamics too fast: M*L = " + std::to_string(out.ml) +
                              " >= " + std::to_string(decay0));
    out.delta_max = std::log(out.ml / decay0) / std::log(profile.alpha_hat);
    out.epsilon_limit = 2.0 * out.ml / decay0;
    return out;
}

double estimate_divergence_M(Network net, const AgentStates& f, const AgentStates& f_perturbed,
                             std::span<const double> z_state, int horizon,
                             const ConvergenceProfile& profile, const ProbeSpec& probe) {
    double gap = network_distance(net, f, f_perturbed, probe);
    if (gap <= 0.0)
        throw SignalError("estimate_divergence_M: zero state distance");
    apply_states(net, f_perturbed);
    std::vector<double> x(z_state.begin(), z_state.end());
    double m_hat = 0.0;
    for (int t = 1; t <= horizon; ++t) {
        x = step_synchronous(net, x);
        double denom = (1.0 - profile.phi_hat(t)) * gap;
        if (denom <= 0.0) continue;
        m_hat = std::max(m_hat, net.state_distance(z_state, x) / denom);
    }
    return m_hat;
}

CoupledRun run_coupled(Network& net, const PropagationConfig& prop,
                       const PatternConfig& pattern, const CoupledRunOptions& options) {
    pattern.check();
    prop.check();
    if (options.enforce_safe_step && pattern.delta > options.delta_max)
        throw std::invalid_argument("pattern delta exceeds delta_max with enforcement on");

    CoupledRun run;
    run.report.epsilon = options.epsilon > 0.0 ? options.epsilon : 10.0 * prop.tolerance;

    std::vector<double> x = options.start_state.empty() ? net.zero_state() : options.start_state;
    if (static_cast<int>(x.size()) != net.state_size())
        throw SignalError("start state size mismatch");
    AggregateResult agg = solve_aggregate(net, x, prop);
    std::vector<double> z = agg.fixed_point;

    const int prop_iters = std::max(1, static_cast<int>(std::ceil(pattern.delta - 1e-12)));
    double t = 0.0;

    // Entry marks reaching the half-radius ball (the approach argument works
    // with epsilon/2); violations are later excursions beyond epsilon.
    auto sample = [&](double time, double dist) {
        run.report.times.push_back(time);
        run.report.distances.push_back(dist);
        if (run.report.entry_time < 0.0 && dist <= 0.5 * run.report.epsilon)
            run.report.entry_time = time;
        else if (run.report.entry_time >= 0.0 && dist > run.report.epsilon)
            run.report.violation_times.push_back(time);
    };

    sample(t, net.state_distance(x, z));

    for (int step = 1; step <= options.steps; ++step) {
        AgentStates moved = pattern_step(net, pattern, z, step);
        apply_states(net, moved);

        PropagationConfig ref = prop;
        ref.rng_seed = substream(prop.rng_seed, 0xA66E, step);
        AggregateResult next_agg = solve_aggregate(net, z, ref);
        z = next_agg.fixed_point;

        sample(t, net.state_distance(x, z)); // right after the state jump

        if (prop.mode == PropagationMode::Synchronous) {
            for (int k = 0; k < prop_iters; ++k)
                x = step_synchronous(net, x, prop.exec);
        } else {
            PropagationConfig sub = prop;
            sub.rng_seed = substream(prop.rng_seed, 0x10C4, step);
            auto jp = run_asynchronous(net, x, sub, pattern.delta);
            x = jp.final_state;
        }
        t += pattern.delta;
        sample(t, net.state_distance(x, z)); // after the propagation phase

        if (options.record_states) run.state_trace.push_back(moved);
        run.signal_trace.push_back(x);
        run.aggregate_trace.push_back(z);
    }
    return run;
}

} // namespace cognet
