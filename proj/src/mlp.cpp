#include "cognet/mlp.hpp"

#include "cognet/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cognet {

double logistic(double v) { return 1.0 / (1.0 + std::exp(-v)); }

double logistic_slope(double v) {
    double s = logistic(v);
    return s * (1.0 - s);
}

Perceptron Perceptron::random(const std::vector<int>& sizes, int data_count,
                              std::uint64_t seed) {
    if (sizes.size() < 2) throw std::invalid_argument("need at least two layers");
    Perceptron p;
    p.layer_sizes = sizes;
    p.data_count = data_count;
    p.biases.resize(sizes.size());
    p.weights.resize(sizes.size());
    auto rng = make_rng(seed, 0x313);
    std::uniform_real_distribution<double> uni(-0.5, 0.5);
    for (size_t k = 1; k < sizes.size(); ++k) {
        p.biases[k].assign(sizes[k], 0.0);
        p.weights[k].resize(sizes[k]);
        for (int j = 0; j < sizes[k]; ++j) {
            p.weights[k][j].resize(sizes[k - 1]);
            for (double& w : p.weights[k][j]) w = uni(rng);
        }
    }
    return p;
}

double threshold_unit(double bias, std::span<const double> weights,
                      std::span<const double> inputs) {
    double acc = bias;
    for (size_t i = 0; i < weights.size(); ++i) acc += weights[i] * inputs[i];
    return acc >= 0.0 ? 1.0 : 0.0; // H(0) = 1
}

MlpForward forward_pass(const Perceptron& p,
                        const std::vector<std::vector<double>>& inputs) {
    const int K = p.layers();
    const int M = static_cast<int>(inputs.size());
    MlpForward fwd;
    fwd.x.resize(K);
    fwd.pre.resize(K);
    fwd.x[0].assign(p.layer_sizes[0], std::vector<double>(M, 0.0));
    for (int m = 0; m < M; ++m) {
        if (static_cast<int>(inputs[m].size()) != p.layer_sizes[0])
            throw std::invalid_argument("input width does not match the first layer");
        for (int i = 0; i < p.layer_sizes[0]; ++i) fwd.x[0][i][m] = inputs[m][i];
    }
    for (int k = 1; k < K; ++k) {
        fwd.x[k].assign(p.layer_sizes[k], std::vector<double>(M, 0.0));
        fwd.pre[k].assign(p.layer_sizes[k], std::vector<double>(M, 0.0));
        for (int j = 0; j < p.layer_sizes[k]; ++j) {
            for (int m = 0; m < M; ++m) {
                double acc = p.biases[k][j];
                for (int i = 0; i < p.layer_sizes[k - 1]; ++i)
                    acc += p.weights[k][j][i] * fwd.x[k - 1][i][m];
                fwd.pre[k][j][m] = acc;
                fwd.x[k][j][m] = logistic(acc);
            }
        }
    }
    return fwd;
}

std::vector<std::vector<double>> output_error_gradient(
    const std::vector<std::vector<double>>& actual,
    const std::vector<std::vector<double>>& desired) {
    if (actual.size() != desired.size())
        throw std::invalid_argument("gradient shape mismatch");
    std::vector<std::vector<double>> y(actual.size());
    for (size_t j = 0; j < actual.size(); ++j) {
        if (actual[j].size() != desired[j].size())
            throw std::invalid_argument("gradient shape mismatch");
        y[j].resize(actual[j].size());
        for (size_t m = 0; m < actual[j].size(); ++m)
            y[j][m] = desired[j][m] - actual[j][m];
    }
    return y;
}

double squared_error(const std::vector<std::vector<double>>& exit_gradient) {
    double err = 0.0;
    for (const auto& yj : exit_gradient)
        for (double y : yj) err += 0.5 * y * y;
    return err;
}

MlpBackward backward_pass(const Perceptron& p, const MlpForward& fwd,
                          const std::vector<std::vector<double>>& exit_gradient) {
    const int K = p.layers();
    const int M = static_cast<int>(fwd.x[0][0].size());
    MlpBackward bwd;
    bwd.g.resize(K);
    bwd.g[K - 1] = exit_gradient; // from the exit vertex
    for (int k = K - 1; k >= 2; --k) {
        bwd.g[k - 1].assign(p.layer_sizes[k - 1], std::vector<double>(M, 0.0));
        for (int j = 0; j < p.layer_sizes[k]; ++j)
            for (int m = 0; m < M; ++m) {
                double back = logistic_slope(fwd.pre[k][j][m]) * bwd.g[k][j][m];
                for (int i = 0; i < p.layer_sizes[k - 1]; ++i)
                    bwd.g[k - 1][i][m] += p.weights[k][j][i] * back;
            }
    }
    return bwd;
}

MlpGradients parameter_gradients(const Perceptron& p, const MlpForward& fwd,
                                 const MlpBackward& bwd) {
    const int K = p.layers();
    const int M = static_cast<int>(fwd.x[0][0].size());
    MlpGradients grads;
    grads.bias.resize(K);
    grads.weight.resize(K);
    for (int k = 1; k < K; ++k) {
        grads.bias[k].assign(p.layer_sizes[k], std::vector<double>(M, 0.0));
        grads.weight[k].assign(p.layer_sizes[k],
                               std::vector<std::vector<double>>(
                                   p.layer_sizes[k - 1], std::vector<double>(M, 0.0)));
        for (int j = 0; j < p.layer_sizes[k]; ++j)
            for (int m = 0; m < M; ++m) {
                double gb = -logistic_slope(fwd.pre[k][j][m]) * bwd.g[k][j][m];
                grads.bias[k][j][m] = gb;
                for (int i = 0; i < p.layer_sizes[k - 1]; ++i)
                    grads.weight[k][j][i][m] = gb * fwd.x[k - 1][i][m];
            }
    }
    return grads;
}

double neuron_objective(const MlpGradients& grads, int layer, int neuron) {
    double q = 0.0;
    const auto& gb = grads.bias.at(layer).at(neuron);
    for (size_t m = 0; m < gb.size(); ++m) {
        double term = std::abs(gb[m]);
        for (const auto& gw : grads.weight[layer][neuron]) term += std::abs(gw[m]);
        q -= term;
    }
    return q;
}

void train_step(Perceptron& p, double eta) {
    if (eta <= 0.0) throw std::invalid_argument("eta must be positive");
    auto fwd = forward_pass(p, p.train_inputs);
    const int K = p.layers();
    std::vector<std::vector<double>> actual(p.layer_sizes[K - 1]);
    for (int j = 0; j < p.layer_sizes[K - 1]; ++j) actual[j] = fwd.x[K - 1][j];
    std::vector<std::vector<double>> desired(p.layer_sizes[K - 1]);
    for (int j = 0; j < p.layer_sizes[K - 1]; ++j) {
        desired[j].resize(p.train_targets.size());
        for (size_t m = 0; m < p.train_targets.size(); ++m)
            desired[j][m] = p.train_targets[m][j];
    }
    auto y0 = output_error_gradient(actual, desired);
    auto bwd = backward_pass(p, fwd, y0);
    auto grads = parameter_gradients(p, fwd, bwd);
    for (int k = 1; k < K; ++k)
        for (int j = 0; j < p.layer_sizes[k]; ++j) {
            double gb = 0.0;
            for (double g : grads.bias[k][j]) gb += g;
            p.biases[k][j] -= eta * gb;
            for (int i = 0; i < p.layer_sizes[k - 1]; ++i) {
                double gw = 0.0;
                for (double g : grads.weight[k][j][i]) gw += g;
                p.weights[k][j][i] -= eta * gw;
            }
        }
}

double train_epoch(Perceptron& p, double eta) {
    auto fwd = forward_pass(p, p.train_inputs);
    const int K = p.layers();
    std::vector<std::vector<double>> actual(p.layer_sizes[K - 1]);
    for (int j = 0; j < p.layer_sizes[K - 1]; ++j) actual[j] = fwd.x[K - 1][j];
    std::vector<std::vector<double>> desired(p.layer_sizes[K - 1]);
    for (int j = 0; j < p.layer_sizes[K - 1]; ++j) {
        desired[j].resize(p.train_targets.size());
        for (size_t m = 0; m < p.train_targets.size(); ++m)
            desired[j][m] = p.train_targets[m][j];
    }
    double err = squared_error(output_error_gradient(actual, desired));
    train_step(p, eta);
    return err;
}

std::vector<double> explosion_diagnostic(const Perceptron& p, const MlpForward& fwd,
                                         const MlpBackward& bwd) {
    const int K = p.layers();
    std::vector<double> ratios;
    for (int k = K - 1; k >= 2; --k) {
        double upper = 0.0, lower = 0.0, slope = 0.0;
        int slope_n = 0;
        for (const auto& gj : bwd.g[k])
            for (double g : gj) upper += std::abs(g);
        for (const auto& gj : bwd.g[k - 1])
            for (double g : gj) lower += std::abs(g);
        for (const auto& pj : fwd.pre[k])
            for (double v : pj) {
                slope += logistic_slope(v);
                ++slope_n;
            }
        if (upper <= 0.0 || slope_n == 0) continue;
        double mean_slope = slope / slope_n;
        if (mean_slope <= 0.0) continue;
        ratios.push_back((lower / upper) / mean_slope);
    }
    return ratios;
}

NeuralFeedbackReport neural_feedback_diagnostic(const Perceptron& p,
                                                const std::vector<int>& path,
                                                double strengthen) {
    const int K = p.layers();
    if (static_cast<int>(path.size()) != K)
        throw std::invalid_argument("path must name one neuron per layer");
    auto fwd = forward_pass(p, p.train_inputs);
    std::vector<std::vector<double>> actual(p.layer_sizes[K - 1]);
    for (int j = 0; j < p.layer_sizes[K - 1]; ++j) actual[j] = fwd.x[K - 1][j];
    std::vector<std::vector<double>> desired(p.layer_sizes[K - 1]);
    for (int j = 0; j < p.layer_sizes[K - 1]; ++j) {
        desired[j].resize(p.train_targets.size());
        for (size_t m = 0; m < p.train_targets.size(); ++m)
            desired[j][m] = p.train_targets[m][j];
    }
    auto bwd = backward_pass(p, fwd, output_error_gradient(actual, desired));

    const int M = static_cast<int>(p.train_inputs.size());
    NeuralFeedbackReport report;
    report.path = path;

    // Neuron objective from the equations as published: |dErr/db| times
    // (1 + |backward arc signal|), restricted to the walk arcs.
    for (int k = 1; k < K; ++k) {
        int j = path[k];
        int i = path[k - 1];
        double slack = 0.0;
        for (int m = 0; m < M; ++m) {
            double x_in = fwd.x[k - 1][i][m];
            double g_above = bwd.g[k][j][m]; // y_Fv restricted to the walk
            double pre = p.biases[k][j];
            for (int ii = 0; ii < p.layer_sizes[k - 1]; ++ii)
                pre += p.weights[k][j][ii] * fwd.x[k - 1][ii][m];
            double y_out = p.weights[k][j][i] * logistic_slope(pre) * g_above;

            double x_in_p = x_in + strengthen * (1.0 - x_in);
            double g_above_p = g_above * (1.0 + strengthen);
            double y_out_p = y_out * (1.0 + strengthen);
            double pre_p = pre + p.weights[k][j][i] * (x_in_p - x_in);

            auto q = [&](double prev, double g_up, double y_back) {
                double gb = logistic_slope(prev) * g_up;
                return -std::abs(gb) * (1.0 + std::abs(y_back));
            };
            double a = q(pre_p, g_above_p, y_out_p);
            double b = q(pre_p, g_above_p, y_out);
            double c = q(pre, g_above, y_out_p);
            double d = q(pre, g_above, y_out);
            slack += (a - b) - (c - d);
        }
        report.slack.push_back(slack);
    }
    return report;
}

TwoWayNetwork to_twoway(const Perceptron& p) {
    const int K = p.layers();
    const int M = p.data_count;
    TwoWayNetwork net;
    net.forward_space = std::make_shared<SignalSpace>(SignalSpace::reals(M));
    net.backward_space = std::make_shared<SignalSpace>(SignalSpace::reals(M));

    // vertices: layer neurons then the exit
    std::vector<std::vector<Vertex>> vid(K);
    for (int k = 0; k < K; ++k)
        for (int j = 0; j < p.layer_sizes[k]; ++j)
            vid[k].push_back(net.graph.add_vertex("n" + std::to_string(k) + "_" +
                                                  std::to_string(j)));
    Vertex exit = net.graph.add_vertex("exit");
    for (Vertex v : vid[0]) net.graph.set_environment(v, EnvRole::Entry);
    net.graph.set_environment(exit, EnvRole::Exit);

    for (int k = 1; k < K; ++k)
        for (int j = 0; j < p.layer_sizes[k]; ++j)
            for (int i = 0; i < p.layer_sizes[k - 1]; ++i)
                net.graph.add_arc(vid[k - 1][i], vid[k][j]);
    for (int j = 0; j < p.layer_sizes[K - 1]; ++j)
        net.graph.add_arc(vid[K - 1][j], exit);

    net.agents.resize(net.graph.vertex_count());

    // entry agents: constant forward activity per data point
    for (int i = 0; i < p.layer_sizes[0]; ++i) {
        TwoWayAgent a;
        a.vertex = vid[0][i];
        a.family = "mlp_entry";
        a.frozen = true;
        int fan_out = static_cast<int>(net.graph.out_arcs(vid[0][i]).size());
        std::vector<double> activity(M);
        for (int m = 0; m < M; ++m) activity[m] = p.train_inputs[m][i];
        a.params = activity;
        a.eval = [M, fan_out](std::span<const double> prm, std::span<const double>,
                              std::span<double> out) {
            for (int o = 0; o < fan_out; ++o)
                for (int m = 0; m < M; ++m) out[o * M + m] = prm[m];
        };
        net.agents[a.vertex] = std::move(a);
    }

    // hidden and output neurons
    for (int k = 1; k < K; ++k) {
        int n_in = p.layer_sizes[k - 1];
        for (int j = 0; j < p.layer_sizes[k]; ++j) {
            TwoWayAgent a;
            a.vertex = vid[k][j];
            a.family = "mlp_neuron";
            int fan_out = static_cast<int>(net.graph.out_arcs(a.vertex).size());
            a.params.push_back(p.biases[k][j]);
            for (int i = 0; i < n_in; ++i) a.params.push_back(p.weights[k][j][i]);
            // in = [x per in-arc | y per out-arc]; out = [x per out-arc | y per in-arc]
            a.eval = [M, n_in, fan_out](std::span<const double> prm,
                                        std::span<const double> in,
                                        std::span<double> out) {
                for (int m = 0; m < M; ++m) {
                    double pre = prm[0];
                    for (int i = 0; i < n_in; ++i) pre += prm[1 + i] * in[i * M + m];
                    double x = logistic(pre);
                    double gsum = 0.0;
                    for (int o = 0; o < fan_out; ++o)
                        gsum += in[(n_in + o) * M + m];
                    double back = logistic_slope(pre) * gsum;
                    for (int o = 0; o < fan_out; ++o) out[o * M + m] = x;
                    for (int i = 0; i < n_in; ++i)
                        out[(fan_out + i) * M + m] = prm[1 + i] * back;
                }
            };
            net.agents[a.vertex] = std::move(a);
        }
    }

    // exit agent: emits desired-minus-actual on each in-arc mirror
    {
        TwoWayAgent a;
        a.vertex = exit;
        a.family = "mlp_exit";
        a.frozen = true;
        int n_in = p.layer_sizes[K - 1];
        std::vector<double> targets(static_cast<size_t>(n_in) * M);
        for (int j = 0; j < n_in; ++j)
            for (int m = 0; m < M; ++m)
                targets[static_cast<size_t>(j) * M + m] = p.train_targets[m][j];
        a.params = std::move(targets);
        a.eval = [M, n_in](std::span<const double> prm, std::span<const double> in,
                           std::span<double> out) {
            for (int j = 0; j < n_in; ++j)
                for (int m = 0; m < M; ++m)
                    out[j * M + m] = prm[j * M + m] - in[j * M + m];
        };
        net.agents[a.vertex] = std::move(a);
    }
    return net;
}

std::string save_model_json(const Perceptron& p) {
    nlohmann::ordered_json j;
    j["layer_sizes"] = p.layer_sizes;
    j["data_count"] = p.data_count;
    j["biases"] = p.biases;
    j["weights"] = p.weights;
    return j.dump(2);
}

Perceptron load_model_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    Perceptron p;
    p.layer_sizes = j.at("layer_sizes").get<std::vector<int>>();
    p.data_count = j.value("data_count", 0);
    p.biases = j.at("biases").get<std::vector<std::vector<double>>>();
    p.weights = j.at("weights").get<std::vector<std::vector<std::vector<double>>>>();
    return p;
}

void load_training_csv(Perceptron& p, const std::string& csv_text) {
    const int n_in = p.layer_sizes.front();
    const int n_out = p.layer_sizes.back();
    p.train_inputs.clear();
    p.train_targets.clear();
    std::istringstream stream(csv_text);
    std::string line;
    while (std::getline(stream, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<double> row;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
        if (static_cast<int>(row.size()) != n_in + n_out)
            throw std::invalid_argument("training row width mismatch");
        p.train_inputs.emplace_back(row.begin(), row.begin() + n_in);
        p.train_targets.emplace_back(row.begin() + n_in, row.end());
    }
    p.data_count = static_cast<int>(p.train_inputs.size());
}

} // namespace cognet
