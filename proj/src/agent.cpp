#include "cognet/agent.hpp"

#include <algorithm>
#include <cmath>

namespace cognet {

void Agent::clamp_params(std::span<double> theta) const {
    if (param_lo.empty() && param_hi.empty()) return;
    for (size_t i = 0; i < theta.size(); ++i) {
        if (i < param_lo.size()) theta[i] = std::max(theta[i], param_lo[i]);
        if (i < param_hi.size()) theta[i] = std::min(theta[i], param_hi[i]);
    }
}

EvalFn make_affine_eval(int n_in, int n_out) {
    return [n_in, n_out](std::span<const double> p, std::span<const double> in,
                         std::span<double> out) {
        for (int j = 0; j < n_out; ++j) {
            double acc = p[j];
            const double* w = p.data() + n_out + static_cast<size_t>(j) * n_in;
            for (int i = 0; i < n_in; ++i) acc += w[i] * in[i];
            out[j] = acc;
        }
    };
}

double affine_alpha(std::span<const double> params, int n_in, int n_out) {
    double worst = 0.0;
    for (int i = 0; i < n_in; ++i) {
        double col = 0.0;
        for (int j = 0; j < n_out; ++j)
            col += std::abs(params[n_out + static_cast<size_t>(j) * n_in + i]);
        worst = std::max(worst, col);
    }
    return worst;
}

EvalFn make_constant_eval(int n_out) {
    return [n_out](std::span<const double> p, std::span<const double>,
                   std::span<double> out) {
        for (int j = 0; j < n_out; ++j) out[j] = p[j];
    };
}

EvalFn make_logistic_eval(int n_in, int n_out, double lo, double hi, double gain) {
    return [n_in, n_out, lo, hi, gain](std::span<const double> p,
                                       std::span<const double> in,
                                       std::span<double> out) {
        for (int j = 0; j < n_out; ++j) {
            double acc = p[j];
            const double* w = p.data() + n_out + static_cast<size_t>(j) * n_in;
            for (int i = 0; i < n_in; ++i) acc += w[i] * in[i];
            out[j] = lo + (hi - lo) / (1.0 + std::exp(-gain * acc));
        }
    };
}

UtilityFn make_bilinear_utility(double sign) {
    return [sign](std::span<const double> in, std::span<const double> out) {
        double si = 0.0, so = 0.0;
        for (double x : in) si += x;
        for (double x : out) so += x;
        return sign * si * so;
    };
}

UtilityFn make_target_utility(double target) {
    return [target](std::span<const double>, std::span<const double> out) {
        double so = 0.0;
        for (double x : out) so += x;
        double d = so - target;
        return -d * d;
    };
}

} // namespace cognet
