#include "cognet/feedback.hpp"

#include "cognet/rng.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace cognet {

namespace {

std::vector<Vertex> walk_vertices(const DirectedGraph& g, const std::vector<ArcId>& arcs) {
    std::set<Vertex> vs;
    for (ArcId e : arcs) {
        vs.insert(g.arc(e).tail);
        vs.insert(g.arc(e).head);
    }
    return {vs.begin(), vs.end()};
}

// Strong connectivity of the subgraph induced by the arc set.
bool strongly_connected(const DirectedGraph& g, const std::vector<Vertex>& vs,
                        const std::vector<ArcId>& arcs) {
    if (vs.empty()) return false;
    std::map<Vertex, std::vector<Vertex>> fwd, bwd;
    for (ArcId e : arcs) {
        fwd[g.arc(e).tail].push_back(g.arc(e).head);
        bwd[g.arc(e).head].push_back(g.arc(e).tail);
    }
    auto reaches_all = [&](const std::map<Vertex, std::vector<Vertex>>& adj) {
        std::set<Vertex> seen{vs.front()};
        std::vector<Vertex> stack{vs.front()};
        while (!stack.empty()) {
            Vertex v = stack.back();
            stack.pop_back();
            auto it = adj.find(v);
            if (it == adj.end()) continue;
            for (Vertex w : it->second)
                if (seen.insert(w).second) stack.push_back(w);
        }
        return seen.size() == vs.size();
    };
    return reaches_all(fwd) && reaches_all(bwd);
}

// Simple directed cycles with <= max_size vertices, optionally restricted to
// an arc subset. Arc sets identify cycles, so parallel arcs yield distinct
// cycles. Environment vertices are excluded: the feedback definition has no
// utility for them.
std::set<std::vector<ArcId>> simple_cycles(const DirectedGraph& g, int max_size,
                                           const std::set<ArcId>* allowed) {
    std::set<std::vector<ArcId>> found;
    const int n = g.vertex_count();
    for (Vertex s = 0; s < n; ++s) {
        if (g.is_environment(s)) continue;
        std::vector<ArcId> path;
        std::set<Vertex> visited{s};
        auto dfs = [&](auto&& self, Vertex at) -> void {
            for (ArcId e : g.out_arcs(at)) {
                if (allowed && !allowed->count(e)) continue;
                Vertex next = g.arc(e).head;
                if (next == s) {
                    path.push_back(e);
                    std::vector<ArcId> cycle(path);
                    std::sort(cycle.begin(), cycle.end());
                    found.insert(std::move(cycle));
                    path.pop_back();
                    continue;
                }
                if (next < s || visited.count(next) || g.is_environment(next)) continue;
                if (static_cast<int>(visited.size()) >= max_size) continue;
                visited.insert(next);
                path.push_back(e);
                self(self, next);
                path.pop_back();
                visited.erase(next);
            }
        };
        dfs(dfs, s);
    }
    return found;
}

std::vector<ClosedWalk> enumerate_impl(const DirectedGraph& g, int max_size,
                                       const std::set<ArcId>* allowed) {
    auto found = simple_cycles(g, max_size, allowed);

    // Close under unions of vertex-overlapping members within the size cap;
    // a union of strongly connected subgraphs sharing a vertex is strongly
    // connected.
    bool grew = true;
    while (grew) {
        grew = false;
        std::vector<std::vector<ArcId>> snapshot(found.begin(), found.end());
        for (size_t i = 0; i < snapshot.size(); ++i) {
            auto vi = walk_vertices(g, snapshot[i]);
            for (size_t j = i + 1; j < snapshot.size(); ++j) {
                auto vj = walk_vertices(g, snapshot[j]);
                bool overlap = false;
                for (Vertex v : vj)
                    if (std::binary_search(vi.begin(), vi.end(), v)) {
                        overlap = true;
                        break;
                    }
                if (!overlap) continue;
                std::vector<ArcId> merged;
                std::set_union(snapshot[i].begin(), snapshot[i].end(),
                               snapshot[j].begin(), snapshot[j].end(),
                               std::back_inserter(merged));
                if (static_cast<int>(walk_vertices(g, merged).size()) > max_size) continue;
                if (found.insert(merged).second) grew = true;
            }
        }
    }

    std::vector<ClosedWalk> walks;
    for (const auto& arcs : found)
        walks.push_back({walk_vertices(g, arcs), arcs});
    return walks;
}

} // namespace

bool is_closed_walk(const DirectedGraph& g, const ClosedWalk& walk) {
    if (walk.arcs.empty()) return false;
    auto vs = walk_vertices(g, walk.arcs);
    if (vs != walk.vertices) return false;
    std::map<Vertex, int> ins, outs;
    for (ArcId e : walk.arcs) {
        outs[g.arc(e).tail]++;
        ins[g.arc(e).head]++;
    }
    for (Vertex v : walk.vertices)
        if (ins[v] == 0 || outs[v] == 0) return false;
    return strongly_connected(g, vs, walk.arcs);
}

ClosedWalk make_walk(const DirectedGraph& g, std::vector<ArcId> arcs) {
    std::sort(arcs.begin(), arcs.end());
    arcs.erase(std::unique(arcs.begin(), arcs.end()), arcs.end());
    ClosedWalk walk{walk_vertices(g, arcs), arcs};
    if (!is_closed_walk(g, walk))
        throw std::invalid_argument("arc set is not a strongly connected closed walk");
    return walk;
}

std::vector<ClosedWalk> enumerate_candidate_walks(const DirectedGraph& g, int max_size) {
    if (max_size < 2) throw std::invalid_argument("max_size must be >= 2");
    return enumerate_impl(g, max_size, nullptr);
}

double FeedbackReport::worst_slack() const {
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& v : verdicts) worst = std::min(worst, v.worst_slack);
    return verdicts.empty() ? 0.0 : worst;
}

double restricted_distance(const Network& net, const std::vector<ArcId>& arcs,
                           std::span<const double> a, std::span<const double> b) {
    const int w = net.width();
    double total = 0.0;
    for (ArcId e : arcs)
        total += net.space()->distance(a.subspan(e * w, w), b.subspan(e * w, w));
    return total;
}

namespace {

constexpr double kSlackFloor = -1e-12; // weak inequality under float noise

bool is_set_space(const SignalSpace& s) {
    return s.blocks().size() == 1 && s.blocks()[0].kind == SpaceKind::FiniteSet;
}

// Draw x inside the epsilon ball of z, then bump it upward (per the space
// order) on every walk arc into x-prime, still inside the ball. The bump
// touches only walk arcs, so splice(x, x'_{E_C}) equals x-prime itself.
// Returns false when no strict in-budget bump exists.
bool sample_ordered_pair(const Network& net, const std::vector<ArcId>& walk_arcs,
                         std::span<const double> z, double epsilon,
                         std::mt19937_64& rng, std::vector<double>& x,
                         std::vector<double>& xp) {
    const auto& space = *net.space();
    const int w = net.width();
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const bool sets = is_set_space(space);

    x.assign(z.begin(), z.end());
    if (sets) {
        int budget = static_cast<int>(0.45 * epsilon);
        if (budget > 0) {
            std::uniform_int_distribution<size_t> pick(0, x.size() - 1);
            int flips = static_cast<int>(uni(rng) * budget);
            for (int k = 0; k < flips; ++k) {
                size_t i = pick(rng);
                x[i] = x[i] == 0.0 ? 1.0 : 0.0;
            }
        }
    } else {
        double target = 0.45 * epsilon * uni(rng);
        for (double& c : x) c += uni(rng) * 2.0 - 1.0;
        double d = net.state_distance(x, z);
        if (d > 0.0) {
            double scale = target / d;
            for (size_t i = 0; i < x.size(); ++i)
                x[i] = z[i] + (x[i] - z[i]) * scale;
        }
    }

    xp = x;
    double headroom = 0.95 * epsilon - net.state_distance(x, z);
    if (headroom <= 0.0) return false;
    double per_arc = headroom / static_cast<double>(walk_arcs.size());

    for (ArcId e : walk_arcs) {
        if (sets) {
            if (per_arc < 1.0) return false;
            std::vector<size_t> zeros;
            for (int c = 0; c < w; ++c) {
                size_t idx = static_cast<size_t>(e) * w + c;
                if (xp[idx] == 0.0) zeros.push_back(idx);
            }
            if (zeros.empty()) return false; // already the full set
            std::uniform_int_distribution<size_t> pick(0, zeros.size() - 1);
            xp[zeros[pick(rng)]] = 1.0;
            continue;
        }
        std::vector<int> ascending;
        double weight_sum = 0.0;
        for (int c = 0; c < w; ++c) {
            if (space.order_mode(c) == OrderMode::Ascending) {
                ascending.push_back(c);
                weight_sum += net.component_weight(c);
            }
        }
        if (ascending.empty() || weight_sum <= 0.0) return false;
        double mass = per_arc * (0.2 + 0.8 * uni(rng));
        for (int c : ascending) {
            size_t idx = static_cast<size_t>(e) * w + c;
            xp[idx] += mass / weight_sum; // equal strictly-positive share
        }
    }
    return true;
}

FeedbackReport run_feedback_check(const Network& net, const ClosedWalk& walk,
                                  std::span<const double> z_state,
                                  const FeedbackCheckConfig& config) {
    if (!net.space()->has_order())
        throw UnorderedSpaceError("signal space has no order; feedback needs one");
    for (Vertex v : walk.vertices)
        if (net.graph().is_environment(v))
            throw std::invalid_argument("environment vertex " + net.graph().name(v) +
                                        " cannot belong to a feedback loop");
    if (config.samples < 1) throw std::invalid_argument("samples must be >= 1");

    FeedbackReport report;
    report.walk = walk;
    for (Vertex v : walk.vertices)
        report.verdicts.push_back({v, true, std::numeric_limits<double>::infinity()});

    auto rng = make_rng(config.seed, 0xFEED);
    std::vector<double> x, xp, in0, in1, out0, out1;

    int attempts = 0;
    const int max_attempts = config.samples * 16;
    while (report.samples_used < config.samples && attempts < max_attempts) {
        ++attempts;
        if (!sample_ordered_pair(net, walk.arcs, z_state, config.epsilon, rng, x, xp))
            continue;
        for (auto& verdict : report.verdicts) {
            const Agent& a = net.agent(verdict.vertex);
            auto q = [&](std::span<const double> vin, std::span<const double> vout) {
                // An agent with no utility counts as constant utility.
                return a.has_utility() ? a.utility(vin, vout) : 0.0;
            };
            in0.resize(a.read_slots.size());
            in1.resize(a.read_slots.size());
            out0.resize(a.write_slots.size());
            out1.resize(a.write_slots.size());
            net.gather(x, a.read_slots, in0);
            net.gather(xp, a.read_slots, in1);
            net.gather(x, a.write_slots, out0);
            net.gather(xp, a.write_slots, out1);
            double lhs = q(in1, out1) - q(in1, out0);
            double rhs = q(in0, out1) - q(in0, out0);
            double slack = lhs - rhs;
            verdict.worst_slack = std::min(verdict.worst_slack, slack);
            if (slack < kSlackFloor) verdict.passed = false;
        }
        ++report.samples_used;
    }
    if (report.samples_used == 0)
        throw InsufficientSamplesError("no ordered sample pairs inside the epsilon ball");

    report.is_feedback_loop = std::all_of(report.verdicts.begin(), report.verdicts.end(),
                                          [](const AgentVerdict& v) { return v.passed; });
    return report;
}

} // namespace

FeedbackReport check_reinforcement(const Network& net, const std::vector<Vertex>& members,
                                   const std::vector<ArcId>& arcs,
                                   std::span<const double> z_state,
                                   const FeedbackCheckConfig& config) {
    ClosedWalk walk;
    walk.vertices = members;
    walk.arcs = arcs;
    std::sort(walk.vertices.begin(), walk.vertices.end());
    std::sort(walk.arcs.begin(), walk.arcs.end());
    return run_feedback_check(net, walk, z_state, config);
}

FeedbackReport check_supermodular_pair(const Network& net, Vertex u, Vertex v,
                                       std::span<const double> z_state,
                                       const FeedbackCheckConfig& config) {
    ArcId uv = -1, vu = -1;
    for (ArcId e : net.graph().out_arcs(u))
        if (net.graph().arc(e).head == v) {
            uv = e;
            break;
        }
    for (ArcId e : net.graph().out_arcs(v))
        if (net.graph().arc(e).head == u) {
            vu = e;
            break;
        }
    if (uv < 0 || vu < 0)
        throw std::invalid_argument("agents are not mutually connected");
    ClosedWalk pair = make_walk(net.graph(), {uv, vu});
    return run_feedback_check(net, pair, z_state, config);
}

FeedbackReport check_feedback_loop(const Network& net, const ClosedWalk& walk,
                                   std::span<const double> z_state,
                                   const FeedbackCheckConfig& config) {
    if (!is_closed_walk(net.graph(), walk))
        throw std::invalid_argument("invalid closed walk");
    return run_feedback_check(net, walk, z_state, config);
}

bool check_coherence(const Network& net, const ClosedWalk& walk,
                     std::span<const double> z_state, const FeedbackCheckConfig& config) {
    std::set<ArcId> allowed(walk.arcs.begin(), walk.arcs.end());
    int max_size = static_cast<int>(walk.vertices.size());
    auto subwalks = enumerate_impl(net.graph(), max_size, &allowed);
    for (const auto& sub : subwalks) {
        if (sub.arcs == walk.arcs) continue; // proper subgraphs only
        try {
            if (run_feedback_check(net, sub, z_state, config).is_feedback_loop)
                return false;
        } catch (const InsufficientSamplesError&) {
            // a subwalk we cannot sample cannot demonstrate feedback
        }
    }
    return true;
}

double check_robustness(Network net, const ClosedWalk& walk,
                        std::span<const double> z_state,
                        const FeedbackCheckConfig& config,
                        const PropagationConfig& prop, int background_samples) {
    if (background_samples < 1)
        throw std::invalid_argument("background_samples must be >= 1");
    std::set<Vertex> members(walk.vertices.begin(), walk.vertices.end());
    std::vector<Vertex> outside;
    for (int v = 0; v < net.graph().vertex_count(); ++v) {
        const Agent& a = net.agent(v);
        if (members.count(v) || a.frozen || a.params.empty()) continue;
        if (a.param_lo.size() == a.params.size() && a.param_hi.size() == a.params.size())
            outside.push_back(v);
    }
    if (outside.empty()) return 1.0; // nothing outside the walk can vary

    auto rng = make_rng(config.seed, 0x0B57);
    int passes = 0;
    for (int s = 0; s < background_samples; ++s) {
        for (Vertex v : outside) {
            Agent& a = net.agent(v);
            for (size_t i = 0; i < a.params.size(); ++i) {
                std::uniform_real_distribution<double> uni(a.param_lo[i], a.param_hi[i]);
                a.params[i] = uni(rng);
            }
        }
        try {
            auto agg = solve_aggregate(net, z_state, prop);
            if (!agg.converged) continue;
            FeedbackCheckConfig sub = config;
            sub.seed = substream(config.seed, 0x0B58, s);
            if (run_feedback_check(net, walk, agg.fixed_point, sub).is_feedback_loop)
                ++passes;
        } catch (const DivergedError&) {
            // divergence under a background state is a failed sample
        } catch (const InsufficientSamplesError&) {
        }
    }
    return static_cast<double>(passes) / background_samples;
}

bool check_pattern(const Network& net, const CoupledRun& run, const ClosedWalk& walk,
                   const PropagationConfig& prop, const PatternConfig& pattern,
                   const PatternCheckConfig& config) {
    if (run.signal_trace.empty() || run.state_trace.empty())
        throw std::invalid_argument("coupled-run trace too short for a pattern check");
    if (config.radius <= 0.0) throw std::invalid_argument("stability radius must be positive");

    Network base = net;
    apply_states(base, run.state_trace.back());
    const std::vector<double>& x_end = run.signal_trace.back();
    auto z_ref = solve_aggregate(base, x_end, prop).fixed_point;

    // Unperturbed continuation: the walk's aggregate subvector must hold still.
    {
        Network sim = base;
        CoupledRunOptions opts;
        opts.steps = config.window;
        opts.start_state = x_end;
        opts.record_states = false;
        CoupledRun cont = run_coupled(sim, prop, pattern, opts);
        for (const auto& z_t : cont.aggregate_trace)
            if (restricted_distance(net, walk.arcs, z_t, z_ref) > config.drift_tolerance)
                return false;
    }

    // Perturbation probes: excursions stay within amplification * radius.
    auto rng = make_rng(config.seed, 0x1A9B);
    std::uniform_real_distribution<double> sym(-1.0, 1.0);
    const int w = net.width();
    for (int p = 0; p < config.perturbations; ++p) {
        std::vector<double> x0 = z_ref;
        double d = 0.0;
        std::vector<double> noise(walk.arcs.size() * w);
        for (double& c : noise) c = sym(rng);
        // scale noise to a restricted distance of exactly radius
        {
            std::vector<double> probe = x0;
            size_t k = 0;
            for (ArcId e : walk.arcs)
                for (int c = 0; c < w; ++c, ++k)
                    probe[static_cast<size_t>(e) * w + c] += noise[k];
            d = restricted_distance(net, walk.arcs, probe, x0);
        }
        if (d <= 0.0) continue;
        size_t k = 0;
        for (ArcId e : walk.arcs)
            for (int c = 0; c < w; ++c, ++k)
                x0[static_cast<size_t>(e) * w + c] += noise[k] * (config.radius / d);

        Network sim = base;
        CoupledRunOptions opts;
        opts.steps = config.window;
        opts.start_state = x0;
        opts.record_states = false;
        CoupledRun cont = run_coupled(sim, prop, pattern, opts);
        double bound = config.amplification * config.radius;
        for (const auto& x_t : cont.signal_trace)
            if (restricted_distance(net, walk.arcs, x_t, z_ref) > bound) return false;
    }
    return true;
}

FeedbackReport analyze_walk(Network& net, const ClosedWalk& walk,
                            std::span<const double> z_state,
                            const FeedbackCheckConfig& config,
                            const PropagationConfig& prop,
                            const PatternConfig& pattern,
                            const PatternCheckConfig& pattern_cfg,
                            int background_samples, const CoupledRun* run) {
    FeedbackReport report = check_feedback_loop(net, walk, z_state, config);
    if (report.is_feedback_loop) {
        report.is_coherent = check_coherence(net, walk, z_state, config);
        if (background_samples > 0)
            report.robustness_passed =
                check_robustness(net, walk, z_state, config, prop, background_samples);
    }
    if (run) {
        report.stability_radius = pattern_cfg.radius;
        bool lyapunov = check_pattern(net, *run, walk, prop, pattern, pattern_cfg);
        report.is_pattern = lyapunov && report.is_feedback_loop;
    }
    return report;
}

} // namespace cognet
