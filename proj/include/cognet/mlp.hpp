#pragma once
// Multilayer perceptron with vanilla backpropagation, expressed as a two-way
// cognitive network: forward firing activity, backward error gradients,
// weights and biases as agent state.

#include "cognet/twoway.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace cognet {

// Layered perceptron. weights[k][j][i] is the arc from neuron i in layer k-1
// to neuron j in layer k (k >= 1); biases[k][j] likewise (input layer has
// neither). Signals carry one real per data point.
struct Perceptron {
    std::vector<int> layer_sizes;
    int data_count = 0;
    std::vector<std::vector<double>> biases;               // [k][j], k>=1
    std::vector<std::vector<std::vector<double>>> weights; // [k][j][i], k>=1
    std::vector<std::vector<double>> train_inputs;  // [m][i in L1]
    std::vector<std::vector<double>> train_targets; // [m][i in LK]

    int layers() const { return static_cast<int>(layer_sizes.size()); }
    static Perceptron random(const std::vector<int>& sizes, int data_count,
                             std::uint64_t seed); // weights U[-0.5,0.5], biases 0
};

// Activities and pre-activations per layer, neuron and data point.
struct MlpForward {
    std::vector<std::vector<std::vector<double>>> x;   // [k][j][m]
    std::vector<std::vector<std::vector<double>>> pre; // [k][j][m], k>=1
};

// Backward gradient sums per neuron: g[k][j][m] = sum of backward signals on
// the neuron's out-arcs. For the output layer that is the error gradient
// received from the exit vertex.
struct MlpBackward {
    std::vector<std::vector<std::vector<double>>> g; // [k][j][m]
};

struct MlpGradients {
    std::vector<std::vector<std::vector<double>>> bias;                // [k][j][m]
    std::vector<std::vector<std::vector<std::vector<double>>>> weight; // [k][j][i][m]
};

double logistic(double v);
double logistic_slope(double v); // S' = S(1-S)

// Heaviside threshold neuron; H(0) = 1.
double threshold_unit(double bias, std::span<const double> weights,
                      std::span<const double> inputs);

// Layer-by-layer sweep; one pass reaches the forward fixed point.
MlpForward forward_pass(const Perceptron& p,
                        const std::vector<std::vector<double>>& inputs);

// y_i = desired - actual at the exit vertex, per data point.
std::vector<std::vector<double>> output_error_gradient(
    const std::vector<std::vector<double>>& actual,
    const std::vector<std::vector<double>>& desired);

// Err = 1/2 sum of squared exit gradients.
double squared_error(const std::vector<std::vector<double>>& exit_gradient);

// Sweep from the output layer down; one pass reaches the backward fixed point.
MlpBackward backward_pass(const Perceptron& p, const MlpForward& fwd,
                          const std::vector<std::vector<double>>& exit_gradient);

// True Err gradients per parameter and data point. (The backward signal is
// desired-minus-actual, so the chain rule carries a minus sign, and the
// weight factor is the forward activity on the arc.)
MlpGradients parameter_gradients(const Perceptron& p, const MlpForward& fwd,
                                 const MlpBackward& bwd);

// q_v = -sum_m (|dErr/db| + sum_e |dErr/dw_e|).
double neuron_objective(const MlpGradients& grads, int layer, int neuron);

// Batch gradient descent: every weight and bias moves by -eta * gradient.
void train_step(Perceptron& p, double eta);
// Convenience: forward, backward, update; returns Err before the update.
double train_epoch(Perceptron& p, double eta);

// Per-backward-jump amplification with the activation-slope factor divided
// out; tracks the spectral size of the layer weights. ratios[k] maps the jump
// from layer k+1 into layer k (k >= 1).
std::vector<double> explosion_diagnostic(const Perceptron& p, const MlpForward& fwd,
                                         const MlpBackward& bwd);

// Four-way splice comparison of the neuron objective along an input-to-output
// path and its mirror. Uses the equations as written in their original form
// (the weight-gradient factor is the backward arc signal), so this reports
// slack only and carries no verdict.
struct NeuralFeedbackReport {
    std::vector<int> path;            // neuron index per layer
    std::vector<double> slack;        // per interior neuron (layers 1..K-1)
};
NeuralFeedbackReport neural_feedback_diagnostic(const Perceptron& p,
                                                const std::vector<int>& path,
                                                double strengthen = 0.25);

// Two-way network view: neurons as agents, input layer as frozen entries,
// exit vertex holding the training targets as a frozen exit.
TwoWayNetwork to_twoway(const Perceptron& p);

// JSON model IO and CSV training data (inputs..., targets...).
std::string save_model_json(const Perceptron& p);
Perceptron load_model_json(const std::string& text);
void load_training_csv(Perceptron& p, const std::string& csv_text);

} // namespace cognet
