#pragma once
// Slow dynamics: greedy per-agent utility ascent under a global Lipschitz
// speed budget, the state-space metric, the safe-step-size rule, and the
// coupled propagation/pattern loop with its separation monitor.

#include "cognet/propagation.hpp"

#include <cstdint>
#include <vector>

namespace cognet {

// Deterministic probe inputs defining the (lower-bound) state metric
//   d_v(f,g) = max over probes of rho_Fv(f(x), g(x)).
// The first two probes are the box corners, the rest uniform draws; the set
// is a pure function of (seed, vertex), so d_v behaves as a fixed metric.
struct ProbeSpec {
    int count = 16;
    double lo = 0.0;
    double hi = 1.0;
    std::uint64_t seed = 7;

    std::vector<std::vector<double>> inputs(int in_width, Vertex v) const;
};

struct PatternConfig {
    double lipschitz_L = 0.1; // max state speed, d_v units per unit time
    double delta = 0.1;       // time increment per pattern step
    int candidate_count = 8;  // argmax search width
    std::uint64_t rng_seed = 1;
    ProbeSpec probe;
    ExecPolicy exec = ExecPolicy::Serial;

    void check() const;
};

using AgentStates = std::vector<std::vector<double>>; // params per vertex

AgentStates snapshot_states(const Network& net);
void apply_states(Network& net, const AgentStates& states);

// d_v via the probe metric.
double state_distance(const Network& net, Vertex v, std::span<const double> theta_f,
                      std::span<const double> theta_g, const ProbeSpec& probe);

// d_V: average of per-agent distances; frozen agents contribute zero.
double network_distance(const Network& net, const AgentStates& f, const AgentStates& g,
                        const ProbeSpec& probe);

// Best sampled state within the d_v-ball of radius `budget` around theta,
// judged by q_v at the frozen input z_in. The incumbent is candidate zero and
// wins ties; the result never has lower utility than the incumbent.
std::vector<double> greedy_step(const Network& net, Vertex v,
                                std::span<const double> theta,
                                std::span<const double> z_in, double budget,
                                int candidates, std::uint64_t seed,
                                const ProbeSpec& probe);

// One simultaneous pattern update: every non-frozen agent with a utility
// performs greedy_step against the same pre-step aggregate.
AgentStates pattern_step(const Network& net, const PatternConfig& config,
                         std::span<const double> z_state, std::uint64_t step_index = 0);

class NoSafeStepError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct SafeStep {
    double delta_max = 0.0;
    double epsilon_limit = 0.0; // 2ML / (-ln alpha), the delta->0 ball radius
    double ml = 0.0;
    double alpha_hat = 0.0;

    // Finite-step ball radius 2 M L delta / (1 - alpha^delta).
    double epsilon_at(double delta) const;
};

// Largest delta with M*L <= -ln(alpha_hat) * alpha_hat^delta on [0, delta].
// Throws NoSafeStepError when the constraint already fails at t=0.
SafeStep max_safe_step(double m_lipschitz, double state_speed,
                       const ConvergenceProfile& profile);

// Smallest M consistent with the sampled divergence of the propagation
// dynamics from the old fixed point after a state perturbation.
double estimate_divergence_M(Network net, const AgentStates& f, const AgentStates& f_perturbed,
                             std::span<const double> z_state, int horizon,
                             const ConvergenceProfile& profile, const ProbeSpec& probe);

struct SeparationReport {
    double epsilon = 0.0;
    std::vector<double> times;
    std::vector<double> distances; // rho_E(signals, current aggregate)
    double entry_time = -1.0;      // first time within the epsilon ball; -1 = never
    std::vector<double> violation_times;

    bool separated() const { return entry_time >= 0.0 && violation_times.empty(); }
};

struct CoupledRunOptions {
    int steps = 1000;
    bool enforce_safe_step = false;
    double delta_max = 0.0; // required when enforcing
    double epsilon = 0.0;   // separation ball; 0 = derive from propagation tolerance
    bool record_states = true;
    std::vector<double> start_state; // empty = all-zero signals
};

struct CoupledRun {
    std::vector<AgentStates> state_trace;          // per step
    std::vector<std::vector<double>> signal_trace; // signals after each step
    std::vector<std::vector<double>> aggregate_trace; // fresh aggregate each step
    SeparationReport report;
};

// Alternates one pattern step against the current aggregate with delta units
// of propagation time; the aggregate is re-solved from its previous value as
// the reference for the separation series. Distances are sampled both right
// after the state jump and after the propagation phase.
CoupledRun run_coupled(Network& net, const PropagationConfig& prop,
                       const PatternConfig& pattern, const CoupledRunOptions& options);

} // namespace cognet
