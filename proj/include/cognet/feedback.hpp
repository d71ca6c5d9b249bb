#pragma once
// Macro-level detectors: supermodular reinforcement over closed walks,
// feedback loops, coherence, robustness, and Lyapunov-stable patterns.

#include "cognet/pattern.hpp"

#include <optional>
#include <string>
#include <vector>

namespace cognet {

// A strongly connected subgraph; every member vertex keeps at least one
// in-arc and one out-arc inside the arc set.
struct ClosedWalk {
    std::vector<Vertex> vertices; // sorted
    std::vector<ArcId> arcs;      // sorted

    bool operator==(const ClosedWalk&) const = default;
};

class UnorderedSpaceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InsufficientSamplesError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Validates the closed-walk invariants against a graph.
bool is_closed_walk(const DirectedGraph& g, const ClosedWalk& walk);
ClosedWalk make_walk(const DirectedGraph& g, std::vector<ArcId> arcs); // throws if invalid

// All simple directed cycles with at most max_size vertices (environment
// vertices excluded), plus strongly connected unions of overlapping cycles up
// to max_size vertices. Deterministic order: lexicographic on sorted arc ids.
std::vector<ClosedWalk> enumerate_candidate_walks(const DirectedGraph& g, int max_size);

struct AgentVerdict {
    Vertex vertex = -1;
    bool passed = false;
    double worst_slack = 0.0; // min over samples of LHS - RHS
};

struct FeedbackCheckConfig {
    double epsilon = 0.5;   // separation ball radius around the aggregate
    int samples = 64;
    std::uint64_t seed = 1;
};

struct PatternCheckConfig {
    double radius = 1e-2;       // perturbation size r
    double amplification = 3.0; // allowed excursion factor c
    int window = 200;           // steps of resumed coupled dynamics
    int perturbations = 6;
    double drift_tolerance = 1e-3;
    std::uint64_t seed = 1;
};

struct FeedbackReport {
    ClosedWalk walk;
    std::vector<AgentVerdict> verdicts;
    int samples_used = 0;
    bool is_feedback_loop = false;
    std::optional<bool> is_coherent;
    std::optional<double> robustness_passed; // pass fraction
    std::optional<bool> is_pattern;
    double stability_radius = 0.0;

    double worst_slack() const;
};

// Core reinforcement test on an arbitrary member set and arc set; used by
// the walk check and by two-way lifts whose mirror arcs are implicit in the
// product signals.
FeedbackReport check_reinforcement(const Network& net, const std::vector<Vertex>& members,
                                   const std::vector<ArcId>& arcs,
                                   std::span<const double> z_state,
                                   const FeedbackCheckConfig& config);

// Supermodularity of a mutually connected agent pair, Eq.-level special case
// of the walk check on the 2-cycle {(u,v),(v,u)}.
FeedbackReport check_supermodular_pair(const Network& net, Vertex u, Vertex v,
                                       std::span<const double> z_state,
                                       const FeedbackCheckConfig& config);

// Tests the reinforcement inequality for every member agent over sampled
// ordered pairs in the epsilon ball around the aggregate.
FeedbackReport check_feedback_loop(const Network& net, const ClosedWalk& walk,
                                   std::span<const double> z_state,
                                   const FeedbackCheckConfig& config);

// Coherent iff no proper strongly connected subgraph of the walk passes the
// feedback check.
bool check_coherence(const Network& net, const ClosedWalk& walk,
                     std::span<const double> z_state, const FeedbackCheckConfig& config);

// Resamples states of agents outside the walk uniformly over their parameter
// boxes, re-solves the aggregate and re-runs the check. Divergence under a
// background sample counts as failure. Returns the pass fraction.
double check_robustness(Network net, const ClosedWalk& walk,
                        std::span<const double> z_state,
                        const FeedbackCheckConfig& config,
                        const PropagationConfig& prop, int background_samples);

// Lyapunov test at desk scale: perturb the walk's aggregate subvector by
// sampled perturbations of size <= radius, resume the coupled dynamics and
// require the restricted distance to stay within amplification * radius; the
// unperturbed trace must not drift beyond drift_tolerance.
bool check_pattern(const Network& net, const CoupledRun& run, const ClosedWalk& walk,
                   const PropagationConfig& prop, const PatternConfig& pattern,
                   const PatternCheckConfig& config);

// Full report: feedback verdicts, coherence, robustness and pattern status
// with the implication chain (pattern => feedback loop) enforced.
FeedbackReport analyze_walk(Network& net, const ClosedWalk& walk,
                            std::span<const double> z_state,
                            const FeedbackCheckConfig& config,
                            const PropagationConfig& prop,
                            const PatternConfig& pattern,
                            const PatternCheckConfig& pattern_cfg,
                            int background_samples, const CoupledRun* run);

// Distance restricted to one arc subset.
double restricted_distance(const Network& net, const std::vector<ArcId>& arcs,
                           std::span<const double> a, std::span<const double> b);

} // namespace cognet
