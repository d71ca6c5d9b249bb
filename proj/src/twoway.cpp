#include "cognet/twoway.hpp"

#include "cognet/rng.hpp"

#include <algorithm>
#include <cmath>

namespace cognet {

Network lift_to_oneway(const TwoWayNetwork& net) {
    if (!net.forward_space || !net.backward_space)
        throw SignalError("two-way network needs both signal spaces");
    auto product = std::make_shared<SignalSpace>(
        SignalSpace::product(*net.forward_space, *net.backward_space));
    Network lifted(net.graph, product);

    const int wx = net.forward_space->width();
    const int w = product->width();

    for (int v = 0; v < net.graph.vertex_count(); ++v) {
        const TwoWayAgent& src = net.agents.at(v);
        std::vector<int> reads, writes;
        for (ArcId e : net.graph.in_arcs(v))
            for (int c = 0; c < wx; ++c) reads.push_back(e * w + c);
        for (ArcId e : net.graph.out_arcs(v))
            for (int c = wx; c < w; ++c) reads.push_back(e * w + c);
        for (ArcId e : net.graph.out_arcs(v))
            for (int c = 0; c < wx; ++c) writes.push_back(e * w + c);
        for (ArcId e : net.graph.in_arcs(v))
            for (int c = wx; c < w; ++c) writes.push_back(e * w + c);

        Agent a;
        a.family = src.family;
        a.frozen = src.frozen;
        a.params = src.params;
        a.param_lo = src.param_lo;
        a.param_hi = src.param_hi;
        a.eval = src.eval;
        a.utility = src.utility;
        lifted.set_agent_slots(v, std::move(a), std::move(reads), std::move(writes));
    }
    lifted.validate();
    return lifted;
}

std::vector<int> forward_slots(const Network& lifted, ArcId e) {
    const int w = lifted.width();
    const int wx = lifted.space()->forward_width();
    std::vector<int> slots;
    for (int c = 0; c < wx; ++c) slots.push_back(e * w + c);
    return slots;
}

std::vector<int> backward_slots(const Network& lifted, ArcId e) {
    const int w = lifted.width();
    const int wx = lifted.space()->forward_width();
    std::vector<int> slots;
    for (int c = wx; c < w; ++c) slots.push_back(e * w + c);
    return slots;
}

std::pair<SignalVector, SignalVector> lower_state(const TwoWayNetwork& net,
                                                  const Network& lifted,
                                                  std::span<const double> state) {
    std::vector<ArcId> all(lifted.graph().arc_count());
    for (ArcId e = 0; e < lifted.graph().arc_count(); ++e) all[e] = e;
    SignalVector fwd(net.forward_space, all), bwd(net.backward_space, all);
    const int w = lifted.width();
    const int wx = net.forward_space->width();
    for (ArcId e = 0; e < lifted.graph().arc_count(); ++e) {
        auto fx = fwd.at(e);
        auto fy = bwd.at(e);
        for (int c = 0; c < wx; ++c) fx[c] = state[e * w + c];
        for (int c = wx; c < w; ++c) fy[c - wx] = state[e * w + c];
    }
    return {std::move(fwd), std::move(bwd)};
}

namespace {

// max |f(z + h on slot s) - f(z)| / h over the probed output slots
double fd_gain(const Network& net, const Agent& a, std::span<const double> base,
               const std::vector<int>& in_slots, const std::vector<int>& out_slots,
               double h) {
    std::vector<double> in0(a.read_slots.size()), out0(a.write_slots.size());
    std::vector<double> state(base.begin(), base.end());
    net.gather(state, a.read_slots, in0);
    a.evaluate(in0, out0);

    // positions of the probed slots inside the agent's read/write lists
    auto positions = [](const std::vector<int>& slots, const std::vector<int>& subset) {
        std::vector<int> pos;
        for (int s : subset)
            for (size_t i = 0; i < slots.size(); ++i)
                if (slots[i] == s) pos.push_back(static_cast<int>(i));
        return pos;
    };
    auto in_pos = positions(a.read_slots, in_slots);
    auto out_pos = positions(a.write_slots, out_slots);
    if (in_pos.empty() || out_pos.empty()) return 0.0;

    double gain = 0.0;
    std::vector<double> in1(in0), out1(out0.size());
    for (int ip : in_pos) {
        in1 = in0;
        in1[ip] += h;
        a.evaluate(in1, out1);
        for (int op : out_pos)
            gain = std::max(gain, std::abs(out1[op] - out0[op]) / h);
    }
    return gain;
}

} // namespace

CrossFeedbackReport check_no_cross_feedback(const Network& lifted,
                                            std::span<const double> z_state,
                                            int samples, std::uint64_t seed) {
    CrossFeedbackReport report;
    const double h = 1e-5;
    auto rng = make_rng(seed, 0xCF0);
    std::uniform_real_distribution<double> jitter(-1e-3, 1e-3);

    for (ArcId e = 0; e < lifted.graph().arc_count(); ++e) {
        auto fs = forward_slots(lifted, e);
        auto bs = backward_slots(lifted, e);
        const Agent& head = lifted.agent(lifted.graph().arc(e).head);
        const Agent& tail = lifted.agent(lifted.graph().arc(e).tail);
        double worst = 0.0;
        for (int s = 0; s < std::max(1, samples); ++s) {
            std::vector<double> base(z_state.begin(), z_state.end());
            if (s > 0)
                for (double& c : base) c += jitter(rng);
            // head: y output on e responding to x input on e
            double g1 = fd_gain(lifted, head, base, fs, bs, h);
            // tail: x output on e responding to y input on e
            double g2 = fd_gain(lifted, tail, base, bs, fs, h);
            worst = std::max(worst, g1 * g2);
        }
        if (worst >= 1.0) {
            report.passed = false;
            report.failures.push_back({e, worst});
        }
    }
    return report;
}

} // namespace cognet
