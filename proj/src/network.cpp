#include "cognet/network.hpp"
#include <cmath>

#include <algorithm>
#include <numeric>

namespace cognet {

Network::Network(DirectedGraph graph, SpacePtr space)
    : graph_(std::move(graph)), space_(std::move(space)) {
    if (!space_) throw SignalError("network needs a signal space");
    agents_.resize(graph_.vertex_count());
    for (int v = 0; v < graph_.vertex_count(); ++v) agents_[v].vertex = v;
    for (const auto& blk : space_->blocks())
        for (int i = 0; i < blk.width; ++i) comp_weight_.push_back(blk.metric_scale);
}

void Network::set_agent(Vertex v, Agent a) {
    a.vertex = v;
    a.read_slots = input_slots(v);
    a.write_slots = output_slots(v);
    agents_.at(v) = std::move(a);
}

void Network::set_agent_slots(Vertex v, Agent a,
                              std::vector<int> read_slots, std::vector<int> write_slots) {
    a.vertex = v;
    a.read_slots = std::move(read_slots);
    a.write_slots = std::move(write_slots);
    agents_.at(v) = std::move(a);
}

std::vector<int> Network::input_slots(Vertex v) const {
    std::vector<int> slots;
    for (ArcId e : graph_.in_arcs(v))
        for (int c = 0; c < width(); ++c) slots.push_back(e * width() + c);
    return slots;
}

std::vector<int> Network::output_slots(Vertex v) const {
    std::vector<int> slots;
    for (ArcId e : graph_.out_arcs(v))
        for (int c = 0; c < width(); ++c) slots.push_back(e * width() + c);
    return slots;
}

std::vector<int> Network::arc_slots(ArcId e) const {
    std::vector<int> slots(width());
    std::iota(slots.begin(), slots.end(), e * width());
    return slots;
}

void Network::validate() const {
    std::vector<int> writers(state_size(), 0);
    for (const Agent& a : agents_) {
        if (!a.eval)
            throw GraphError("agent at vertex " + graph_.name(a.vertex) +
                             " has no evaluator");
        for (int s : a.write_slots) {
            if (s < 0 || s >= state_size())
                throw GraphError("write slot out of range");
            writers[s] += 1;
        }
    }
    for (int s = 0; s < state_size(); ++s)
        if (writers[s] != 1)
            throw GraphError("slot " + std::to_string(s) + " written by " +
                             std::to_string(writers[s]) + " agents");
}

SignalVector Network::to_signal_vector(std::span<const double> state) const {
    std::vector<ArcId> all(graph_.arc_count());
    std::iota(all.begin(), all.end(), 0);
    SignalVector out(space_, all);
    std::copy(state.begin(), state.end(), out.flat().begin());
    return out;
}

std::vector<double> Network::from_signal_vector(const SignalVector& x) const {
    if (x.size() != graph_.arc_count())
        throw SignalError("signal vector does not cover all arcs");
    std::vector<double> state(state_size());
    for (ArcId e = 0; e < graph_.arc_count(); ++e) {
        auto src = x.at(e);
        std::copy(src.begin(), src.end(), state.begin() + e * width());
    }
    return state;
}

double Network::state_distance(std::span<const double> a, std::span<const double> b) const {
    double total = 0.0;
    const int w = width();
    for (size_t i = 0; i < a.size(); ++i)
        total += comp_weight_[i % w] * std::abs(a[i] - b[i]);
    return total;
}

double Network::slot_distance(const std::vector<int>& slots, std::span<const double> a,
                              std::span<const double> b) const {
    double total = 0.0;
    const int w = width();
    for (size_t i = 0; i < slots.size(); ++i)
        total += comp_weight_[slots[i] % w] * std::abs(a[i] - b[i]);
    return total;
}

void Network::gather(std::span<const double> state, const std::vector<int>& slots,
                     std::span<double> out) const {
    for (size_t i = 0; i < slots.size(); ++i) out[i] = state[slots[i]];
}

void Network::scatter(std::span<double> state, const std::vector<int>& slots,
                      std::span<const double> values) const {
    for (size_t i = 0; i < slots.size(); ++i) state[slots[i]] = values[i];
}

} // namespace cognet
