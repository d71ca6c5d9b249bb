#pragma once
// Agent functions: per-vertex state mapping input signals to output signals.
//
// The engine works on a flat state vector (one slot per arc component).
// Each agent declares the component slots it reads and the slots it writes;
// for a one-way network those default to the components of T(v) and F(v).
// Two-way lifts reuse the same machinery with mixed slots.

#include "cognet/graph.hpp"
#include "cognet/signal.hpp"

#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace cognet {

// (params, gathered inputs) -> outputs in write-slot order.
using EvalFn = std::function<void(std::span<const double> params,
                                  std::span<const double> in,
                                  std::span<double> out)>;

// q_v(input signals, output signals) -> real.
using UtilityFn = std::function<double(std::span<const double> in,
                                       std::span<const double> out)>;

struct Agent {
    Vertex vertex = -1;
    std::string family;              // evaluator family tag, for IO
    bool frozen = false;             // environment agents never move
    std::optional<double> declared_alpha;
    std::vector<double> params;      // the agent's state point in F_v
    std::vector<double> param_lo, param_hi; // state-space box; empty = unbounded
    std::vector<int> read_slots, write_slots;
    EvalFn eval;
    UtilityFn utility;               // may be empty

    bool has_utility() const { return static_cast<bool>(utility); }
    int in_width() const { return static_cast<int>(read_slots.size()); }
    int out_width() const { return static_cast<int>(write_slots.size()); }

    void evaluate(std::span<const double> in, std::span<double> out) const {
        eval(params, in, out);
    }
    // Evaluate with an explicit state point (used by pattern dynamics).
    void evaluate_with(std::span<const double> theta, std::span<const double> in,
                       std::span<double> out) const {
        eval(theta, in, out);
    }
    // Clamp a state point into the declared box.
    void clamp_params(std::span<double> theta) const;
};

// --- evaluator families ------------------------------------------------

// out_j = bias_j + sum_i W[j][i] * in_i.
// params layout: n_out biases then n_out*n_in weights, row-major by output.
EvalFn make_affine_eval(int n_in, int n_out);
// Induced L1 contraction factor of the affine map (max column abs sum).
double affine_alpha(std::span<const double> params, int n_in, int n_out);

// Outputs equal the parameters; ignores inputs.
EvalFn make_constant_eval(int n_out);

// out_j = lo + (hi-lo) * logistic(gain * (bias_j + sum_i W[j][i] in_i)).
EvalFn make_logistic_eval(int n_in, int n_out, double lo, double hi, double gain);

// --- utility families ---------------------------------------------------

// q = sign * (sum of inputs) * (sum of outputs).
UtilityFn make_bilinear_utility(double sign);
// q = -(sum of outputs - target)^2.
UtilityFn make_target_utility(double target);

} // namespace cognet
