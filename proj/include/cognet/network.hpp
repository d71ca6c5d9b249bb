#pragma once
// A network bundles the graph, the signal space, and one agent per vertex,
// and owns the flat-state layout (arc e occupies slots [e*W, (e+1)*W)).

#include "cognet/agent.hpp"
#include "cognet/graph.hpp"
#include "cognet/signal.hpp"

#include <vector>

namespace cognet {

class Network {
public:
    Network() = default;
    Network(DirectedGraph graph, SpacePtr space);

    const DirectedGraph& graph() const { return graph_; }
    const SpacePtr& space() const { return space_; }
    int width() const { return space_->width(); }
    int state_size() const { return graph_.arc_count() * width(); }

    Agent& agent(Vertex v) { return agents_.at(v); }
    const Agent& agent(Vertex v) const { return agents_.at(v); }
    std::vector<Agent>& agents() { return agents_; }
    const std::vector<Agent>& agents() const { return agents_; }

    // Install an agent with default one-way slots (reads T(v), writes F(v)).
    void set_agent(Vertex v, Agent a);
    // Install an agent with explicit slots (two-way lifts).
    void set_agent_slots(Vertex v, Agent a,
                         std::vector<int> read_slots, std::vector<int> write_slots);

    // Default slot lists for a one-way agent.
    std::vector<int> input_slots(Vertex v) const;
    std::vector<int> output_slots(Vertex v) const;
    // All slots of one arc.
    std::vector<int> arc_slots(ArcId e) const;

    // Checks that every slot is written by exactly one agent and every agent
    // has an evaluator. Throws GraphError on violation.
    void validate() const;

    // Flat-state helpers.
    std::vector<double> zero_state() const { return std::vector<double>(state_size(), 0.0); }
    SignalVector to_signal_vector(std::span<const double> state) const;
    std::vector<double> from_signal_vector(const SignalVector& x) const;
    double state_distance(std::span<const double> a, std::span<const double> b) const;

    void gather(std::span<const double> state, const std::vector<int>& slots,
                std::span<double> out) const;
    void scatter(std::span<double> state, const std::vector<int>& slots,
                 std::span<const double> values) const;

    // Every built-in metric is a componentwise weighted L1, so distances over
    // arbitrary slot subsets reduce to weighted sums.
    double component_weight(int component) const { return comp_weight_.at(component); }
    double slot_distance(const std::vector<int>& slots, std::span<const double> a,
                         std::span<const double> b) const;

private:
    DirectedGraph graph_;
    SpacePtr space_;
    std::vector<Agent> agents_;
    std::vector<double> comp_weight_; // per component within one arc
};

} // namespace cognet
