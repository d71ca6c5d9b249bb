#include "cognet/aco.hpp"

#include "cognet/rng.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace cognet {

void AcoParams::check() const {
    if (payload_q <= 0.0) throw std::invalid_argument("payload must be positive");
    if (evaporation < 0.0 || evaporation >= 1.0)
        throw std::invalid_argument("evaporation must lie in [0,1)");
    if (pheromone_floor <= 0.0)
        throw std::invalid_argument("pheromone floor must be positive");
    if (ants < 0) throw std::invalid_argument("ants must be nonnegative");
}

void AcoInstance::check() const {
    params.check();
    if (colony < 0 || food < 0 || !graph.has_vertex(colony) || !graph.has_vertex(food))
        throw std::invalid_argument("colony and food must be graph vertices");
    if (static_cast<int>(lengths.size()) != graph.arc_count())
        throw std::invalid_argument("lengths must cover every arc");
    for (double l : lengths)
        if (l <= 0.0) throw std::invalid_argument("arc lengths must be positive");
    if (!shortest_path_oracle(graph, lengths, colony, food))
        throw std::invalid_argument("food is not reachable from the colony");
}

double AcoInstance::path_length(const std::vector<ArcId>& path) const {
    double total = 0.0;
    for (ArcId e : path) total += lengths.at(e);
    return total;
}

std::optional<AntPath> ant_walk(const AcoInstance& inst, std::uint64_t seed) {
    auto rng = make_rng(seed, 0xA27);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    AntPath path;
    std::vector<char> visited(inst.graph.vertex_count(), 0);
    Vertex at = inst.colony;
    visited[at] = 1;
    while (at != inst.food) {
        double total = 0.0;
        std::vector<std::pair<ArcId, double>> choices;
        for (ArcId e : inst.graph.out_arcs(at)) {
            Vertex next = inst.graph.arc(e).head;
            if (visited[next]) continue;
            double tau = inst.pheromone[e] + inst.params.pheromone_floor;
            double eta = inst.heuristic[e];
            double w = std::pow(tau, inst.params.pheromone_exp) *
                       std::pow(eta, inst.params.heuristic_exp);
            if (w <= 0.0) continue;
            choices.push_back({e, w});
            total += w;
        }
        if (choices.empty()) return std::nullopt; // stuck, no deposit
        double roll = uni(rng) * total;
        ArcId chosen = choices.back().first;
        for (const auto& [e, w] : choices) {
            roll -= w;
            if (roll <= 0.0) {
                chosen = e;
                break;
            }
        }
        path.push_back(chosen);
        at = inst.graph.arc(chosen).head;
        visited[at] = 1;
    }
    return path;
}

void deposit(AcoInstance& inst, const AntPath& path) {
    if (path.empty() || inst.graph.arc(path.back()).head != inst.food)
        throw std::invalid_argument("deposit path must end at the food vertex");
    double len = inst.path_length(path);
    double density = inst.params.payload_q / len; // pheromone per unit length
    for (ArcId e : path) inst.pheromone[e] += density * inst.lengths[e];
}

void evaporate(AcoInstance& inst, double dt) {
    if (dt < 0.0) throw std::invalid_argument("dt must be nonnegative");
    double keep = std::pow(1.0 - inst.params.evaporation, dt);
    for (double& tau : inst.pheromone) tau *= keep;
}

ColonyTrace run_colony(AcoInstance& inst, int iterations, std::uint64_t seed) {
    if (iterations < 1) throw std::invalid_argument("iterations must be >= 1");
    inst.check();
    ColonyTrace trace;
    trace.best_length = std::numeric_limits<double>::infinity();

    for (int it = 0; it < iterations; ++it) {
        std::vector<AntPath> completed;
        int stuck = 0;
        for (int a = 0; a < inst.params.ants; ++a) {
            auto walk = ant_walk(inst, substream(seed, 0xA0C0, it, a));
            if (walk)
                completed.push_back(std::move(*walk));
            else
                ++stuck;
        }

        std::vector<double> before = inst.pheromone;
        evaporate(inst, 1.0);
        for (const auto& path : completed) deposit(inst, path);

        ColonyIteration rec;
        rec.completed = static_cast<int>(completed.size());
        rec.stuck = stuck;
        std::map<AntPath, int> counts;
        for (const auto& path : completed) {
            counts[path] += 1;
            double len = inst.path_length(path);
            if (rec.best_length == 0.0 || len < rec.best_length) rec.best_length = len;
            if (len < trace.best_length) {
                trace.best_length = len;
                trace.best_path = path;
            }
        }
        if (!counts.empty()) {
            double entropy = 0.0;
            int best_count = 0;
            for (const auto& [path, c] : counts) {
                double pr = static_cast<double>(c) / completed.size();
                entropy -= pr * std::log(pr);
                if (c > best_count) {
                    best_count = c;
                    rec.modal_path = path;
                }
            }
            rec.modal_mass = static_cast<double>(best_count) / completed.size();
            rec.support_size = std::exp(entropy);
        }
        for (size_t e = 0; e < inst.pheromone.size(); ++e) {
            rec.total_pheromone += inst.pheromone[e];
            rec.pheromone_change += std::abs(inst.pheromone[e] - before[e]);
        }
        trace.iterations.push_back(std::move(rec));
        trace.pheromone_history.push_back(inst.pheromone);
    }
    return trace;
}

std::optional<AntPath> shortest_path_oracle(const DirectedGraph& g,
                                            const std::vector<double>& lengths,
                                            Vertex from, Vertex to) {
    for (double l : lengths)
        if (l <= 0.0) throw std::invalid_argument("oracle requires positive lengths");

    struct Label {
        double dist = std::numeric_limits<double>::infinity();
        AntPath path;
        bool settled = false;
    };
    std::vector<Label> labels(g.vertex_count());
    labels[from].dist = 0.0;

    auto better = [](double d, const AntPath& p, const Label& l) {
        if (d < l.dist) return true;
        if (d > l.dist) return false;
        return p < l.path; // lexicographic arc-id tie-break
    };

    for (int round = 0; round < g.vertex_count(); ++round) {
        int pick = -1;
        for (int v = 0; v < g.vertex_count(); ++v) {
            if (labels[v].settled || !std::isfinite(labels[v].dist)) continue;
            if (pick < 0 || labels[v].dist < labels[pick].dist ||
                (labels[v].dist == labels[pick].dist && labels[v].path < labels[pick].path))
                pick = v;
        }
        if (pick < 0) break;
        labels[pick].settled = true;
        if (pick == to) break;
        for (ArcId e : g.out_arcs(pick)) {
            Vertex next = g.arc(e).head;
            double nd = labels[pick].dist + lengths[e];
            AntPath np = labels[pick].path;
            np.push_back(e);
            if (better(nd, np, labels[next])) {
                labels[next].dist = nd;
                labels[next].path = std::move(np);
            }
        }
    }
    if (!std::isfinite(labels[to].dist)) return std::nullopt;
    return labels[to].path;
}

SeparationQuality separation_quality(const ColonyTrace& trace, const AcoParams& params) {
    if (trace.iterations.empty())
        throw std::invalid_argument("empty colony trace");
    SeparationQuality q;
    for (const auto& it : trace.iterations) {
        q.relative_change.push_back(it.pheromone_change / params.payload_q);
        q.support_size.push_back(it.support_size);
    }
    return q;
}

} // namespace cognet
