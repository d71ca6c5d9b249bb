#pragma once
// Shared network builders for the test suites.

#include "cognet/network.hpp"
#include "cognet/rng.hpp"

#include <cmath>
#include <memory>
#include <random>

namespace cognet::testing {

inline SpacePtr reals(int width = 1) {
    return std::make_shared<SignalSpace>(SignalSpace::reals(width));
}

// u: x_(u,v) = slope_u * x_(v,u) + c_u;  v: x_(v,u) = slope_v * x_(u,v) + c_v.
inline Network two_cycle(double slope_u, double c_u, double slope_v, double c_v) {
    DirectedGraph g;
    g.add_vertex("u");
    g.add_vertex("v");
    g.add_arc("u", "v");
    g.add_arc("v", "u");
    Network net(std::move(g), reals());

    auto make = [&](double slope, double c) {
        Agent a;
        a.family = "affine";
        a.params = {c, slope};
        a.eval = make_affine_eval(1, 1);
        a.declared_alpha = std::abs(slope);
        return a;
    };
    net.set_agent(0, make(slope_u, c_u));
    net.set_agent(1, make(slope_v, c_v));
    net.validate();
    return net;
}

// Ring of constant agents; useful when only event scheduling matters.
inline Network constant_ring(int n, double value = 1.0) {
    DirectedGraph g;
    for (int i = 0; i < n; ++i) g.add_vertex("v" + std::to_string(i));
    for (int i = 0; i < n; ++i) g.add_arc(i, (i + 1) % n);
    Network net(std::move(g), reals());
    for (int v = 0; v < n; ++v) {
        Agent a;
        a.family = "constant";
        a.params = {value};
        a.eval = make_constant_eval(1);
        a.declared_alpha = 0.0;
        net.set_agent(v, std::move(a));
    }
    net.validate();
    return net;
}

// Random strongly contractive network: affine agents whose induced L1 norm
// is scaled to a per-agent target below alpha_cap.
inline Network random_contractive(int n_vertices, int n_arcs, double alpha_cap,
                                  std::uint64_t seed) {
    auto rng = make_rng(seed, 0x7E57);
    DirectedGraph g;
    for (int i = 0; i < n_vertices; ++i) g.add_vertex("v" + std::to_string(i));
    // ring for connectivity, then random extra arcs
    for (int i = 0; i < n_vertices; ++i) g.add_arc(i, (i + 1) % n_vertices);
    std::uniform_int_distribution<int> pick(0, n_vertices - 1);
    while (g.arc_count() < n_arcs) {
        int a = pick(rng), b = pick(rng);
        if (a == b) continue;
        g.add_arc(a, b);
    }
    Network net(std::move(g), reals());
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    std::uniform_real_distribution<double> alpha_draw(0.2, alpha_cap);
    for (int v = 0; v < n_vertices; ++v) {
        int n_in = static_cast<int>(net.graph().in_arcs(v).size());
        int n_out = static_cast<int>(net.graph().out_arcs(v).size());
        Agent a;
        a.family = "affine";
        a.params.assign(n_out + static_cast<size_t>(n_out) * n_in, 0.0);
        for (int j = 0; j < n_out; ++j) a.params[j] = uni(rng);
        for (size_t k = n_out; k < a.params.size(); ++k) a.params[k] = uni(rng);
        double norm = affine_alpha(a.params, n_in, n_out);
        double target = alpha_draw(rng);
        if (norm > 0.0)
            for (size_t k = n_out; k < a.params.size(); ++k)
                a.params[k] *= target / norm;
        a.eval = make_affine_eval(n_in, n_out);
        a.declared_alpha = n_in > 0 ? target : 0.0;
        net.set_agent(v, std::move(a));
    }
    net.validate();
    return net;
}

inline std::vector<double> random_state(const Network& net, std::uint64_t seed,
                                        double lo = -1.0, double hi = 1.0) {
    auto rng = make_rng(seed, 0x57A2);
    std::uniform_real_distribution<double> uni(lo, hi);
    std::vector<double> x(net.state_size());
    for (double& c : x) c = uni(rng);
    return x;
}

} // namespace cognet::testing
