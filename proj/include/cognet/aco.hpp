#pragma once
// Ant colony optimization as a two-way cognitive network: waypoint agents,
// heuristic- and pheromone-guided stochastic walks as propagation sampling,
// uniform pheromone deposit and evaporation as pattern dynamics.

#include "cognet/graph.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cognet {

struct AcoParams {
    double payload_q = 1.0;       // pheromone per ant
    double evaporation = 0.1;     // in [0,1)
    double pheromone_exp = 1.0;   // a
    double heuristic_exp = 1.0;   // b
    double pheromone_floor = 0.1; // tau0, keeps early walks exploratory
    int ants = 20;

    void check() const;
};

struct AcoInstance {
    DirectedGraph graph;
    std::vector<double> lengths;   // per arc, positive
    std::vector<double> heuristic; // per arc, >= 0; default 1/length
    std::vector<double> pheromone; // per arc, >= 0
    Vertex colony = -1;
    Vertex food = -1;
    AcoParams params;

    void check() const;
    double path_length(const std::vector<ArcId>& path) const;
};

using AntPath = std::vector<ArcId>; // arcs colony -> food

struct ColonyIteration {
    int completed = 0;
    int stuck = 0;
    double best_length = 0.0;       // best this iteration (0 when none)
    AntPath modal_path;
    double modal_mass = 0.0;        // fraction of completed walks on the mode
    double support_size = 0.0;      // perplexity of the empirical path distribution
    double total_pheromone = 0.0;
    double pheromone_change = 0.0;  // sum |delta tau| this iteration
};

struct ColonyTrace {
    std::vector<ColonyIteration> iterations;
    AntPath best_path;     // running best across iterations
    double best_length = 0.0;
    std::vector<std::vector<double>> pheromone_history; // per iteration snapshot
};

// One heuristic- and pheromone-guided walk; revisiting a vertex is forbidden.
// nullopt = ant got stuck (it deposits nothing).
std::optional<AntPath> ant_walk(const AcoInstance& inst, std::uint64_t seed);

// Adds payload/length(path) per unit length to each path arc.
void deposit(AcoInstance& inst, const AntPath& path);

// tau <- tau * (1-e)^dt.
void evaporate(AcoInstance& inst, double dt);

// Population-per-iteration schedule: walk all ants, evaporate once, deposit
// all completed walks. Deterministic per seed.
ColonyTrace run_colony(AcoInstance& inst, int iterations, std::uint64_t seed);

// Exact shortest path by label-setting search; ties broken toward the
// lexicographically smallest arc sequence. nullopt = unreachable.
std::optional<AntPath> shortest_path_oracle(const DirectedGraph& g,
                                            const std::vector<double>& lengths,
                                            Vertex from, Vertex to);

struct SeparationQuality {
    std::vector<double> relative_change; // pheromone change / per-ant payload
    std::vector<double> support_size;    // effective path support per iteration
};

SeparationQuality separation_quality(const ColonyTrace& trace, const AcoParams& params);

} // namespace cognet
