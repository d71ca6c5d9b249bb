#pragma once
// Two-way cognitive networks: mirrored forward/backward graphs with distinct
// signal spaces, reduced to the one-way engine via product signals.
//
// Each forward arc (u,v) becomes one engine arc carrying (x, y): the x half
// is written by the tail agent and the y half — the backward signal flowing
// v -> u on the mirror arc — by the head agent. Agents read the x halves of
// their forward in-arcs and the y halves of their forward out-arcs, which is
// exactly the two-way signature (x_Tv, y_Fv) -> (x_Fv, y_Tv).

#include "cognet/network.hpp"
#include "cognet/propagation.hpp"

#include <vector>

namespace cognet {

struct TwoWayAgent {
    Vertex vertex = -1;
    std::string family;
    bool frozen = false;
    std::vector<double> params;
    std::vector<double> param_lo, param_hi;
    // in = [x of T(v) arcs | y of F(v) arcs], out = [x of F(v) | y of T(v)]
    EvalFn eval;
    UtilityFn utility;
};

struct TwoWayNetwork {
    DirectedGraph graph; // forward orientation; entries/exits flagged on it
    SpacePtr forward_space;
    SpacePtr backward_space;
    std::vector<TwoWayAgent> agents; // one per vertex
};

// Product-signal reduction; the lifted network passes Network::validate().
Network lift_to_oneway(const TwoWayNetwork& net);

// Slot lists of the forward (x) and backward (y) halves of one lifted arc.
std::vector<int> forward_slots(const Network& lifted, ArcId e);
std::vector<int> backward_slots(const Network& lifted, ArcId e);

// Split a lifted state into per-arc forward and backward signal vectors.
std::pair<SignalVector, SignalVector> lower_state(const TwoWayNetwork& net,
                                                  const Network& lifted,
                                                  std::span<const double> state);

struct CrossFeedbackReport {
    bool passed = true;
    // arcs whose x->y gain (head agent) times y->x gain (tail agent) >= 1
    std::vector<std::pair<ArcId, double>> failures;
};

// Finite-difference check that no positive feedback couples the two signal
// types around any mirrored pair at the aggregate.
CrossFeedbackReport check_no_cross_feedback(const Network& lifted,
                                            std::span<const double> z_state,
                                            int samples, std::uint64_t seed);

} // namespace cognet
