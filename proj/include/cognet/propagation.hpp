#pragma once
// Fast dynamics: synchronous contraction iteration, asynchronous Poisson jump
// process, fixed-point solver, contraction estimation and convergence
// profiling.

#include "cognet/network.hpp"
#include "cognet/parallel.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

namespace cognet {

enum class PropagationMode { Synchronous, Asynchronous };

struct PropagationConfig {
    PropagationMode mode = PropagationMode::Synchronous;
    double poisson_rate = 1.0;   // events per agent per unit time (async)
    double tolerance = 1e-9;     // residual bound
    int max_iterations = 10000;
    int divergence_patience = 50; // strictly growing residual run => Diverged
    std::uint64_t rng_seed = 1;
    ExecPolicy exec = ExecPolicy::Serial;

    void check() const;
};

struct AggregateResult {
    std::vector<double> fixed_point; // flat state
    double residual = 0.0;           // rho_E(step(z), z)
    int iterations_used = 0;
    bool converged = false;
};

struct AsyncEvent {
    double time = 0.0;
    Vertex agent = -1;
};

struct CoverStats {
    double mean = std::numeric_limits<double>::quiet_NaN();
    double median = std::numeric_limits<double>::quiet_NaN();
    int count = 0;
};

// Empirical convergence profile: worst normalized distance to the fixed
// point per unit of time, plus a fitted exponential majorant alpha_hat.
struct ConvergenceProfile {
    std::vector<double> times;
    std::vector<double> sup_ratio; // sup over starts of rho(x_t,z)/rho(x_0,z)
    double alpha_hat = 0.0;        // phi_hat(t) = alpha_hat^t majorizes sup_ratio
    CoverStats cover;              // asynchronous runs only

    double phi_hat(double t) const;
};

struct AsyncRun {
    std::vector<AsyncEvent> events; // ordered by time
    std::vector<double> final_state;
    // states[i] is the state right after events[i]; filled when recording on
    std::vector<std::vector<double>> states;
    CoverStats cover;
};

class DivergedError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// One synchronous update: every output arc of every agent carries f_v applied
// to the prior state. No intra-step ordering effects.
std::vector<double> step_synchronous(const Network& net, std::span<const double> state,
                                     ExecPolicy exec = ExecPolicy::Serial);

// rho_E(step(state), state): the fixed-point residual.
double propagation_residual(const Network& net, std::span<const double> state,
                            ExecPolicy exec = ExecPolicy::Serial);

// Merged per-agent Poisson event streams; each event rewrites exactly one
// agent's output slots in place. Deterministic per seed.
AsyncRun run_asynchronous(const Network& net, std::span<const double> start,
                          const PropagationConfig& config, double horizon,
                          bool record_states = false);

// Successive minimal windows in which every agent fired at least once.
CoverStats cover_intervals(const std::vector<AsyncEvent>& events, int n_agents,
                           double horizon);

// Iterate the configured dynamics until the residual falls under tolerance.
// Budget exhaustion with a shrinking residual returns converged=false;
// a residual that grows for `divergence_patience` consecutive checks throws
// DivergedError.
AggregateResult solve_aggregate(const Network& net, std::span<const double> start,
                                const PropagationConfig& config);

struct ContractionEstimate {
    double alpha_hat = 0.0;
    bool contractive = false;
    int usable_samples = 0;
};

// Input pair generator for contraction sampling.
using PairSampler = std::function<std::pair<std::vector<double>, std::vector<double>>(std::mt19937_64&)>;

// max over samples of rho_out(f(x),f(y)) / rho_in(x,y); zero-distance pairs
// are skipped; all skipped => SignalError.
ContractionEstimate estimate_contraction(const Network& net, Vertex v,
                                         const PairSampler& sampler, int n,
                                         std::uint64_t seed);

// Tabulates worst-case normalized distance to z over time across all starts
// and fits the exponential majorant. In synchronous mode a unit of time is
// one iteration; in asynchronous mode the trajectory is sampled on a fixed
// time grid up to `horizon`.
ConvergenceProfile profile_convergence(const Network& net, std::span<const double> z,
                                       const std::vector<std::vector<double>>& starts,
                                       const PropagationConfig& config,
                                       int sync_steps = 30, double horizon = 0.0,
                                       int async_grid = 60);

} // namespace cognet
