#include "cognet/json_io.hpp"

#include <json.hpp>

namespace cognet {

using nlohmann::json;
using nlohmann::ordered_json;

std::string graph_to_json(const DirectedGraph& g) {
    ordered_json j;
    j["vertices"] = json::array();
    for (int v = 0; v < g.vertex_count(); ++v) j["vertices"].push_back(g.name(v));
    j["arcs"] = json::array();
    for (const Arc& a : g.arcs())
        j["arcs"].push_back({g.name(a.tail), g.name(a.head)});
    ordered_json env = json::object();
    for (int v = 0; v < g.vertex_count(); ++v) {
        switch (g.env_role(v)) {
        case EnvRole::Entry: env[g.name(v)] = "entry"; break;
        case EnvRole::Exit: env[g.name(v)] = "exit"; break;
        case EnvRole::Environment: env[g.name(v)] = "environment"; break;
        case EnvRole::NotEnvironment: break;
        }
    }
    j["environment"] = env;
    return j.dump(2);
}

DirectedGraph graph_from_json(const std::string& text) {
    auto j = json::parse(text);
    DirectedGraph g;
    for (const auto& name : j.at("vertices"))
        g.add_vertex(name.get<std::string>());
    for (const auto& arc : j.at("arcs")) {
        if (!arc.is_array() || arc.size() != 2)
            throw GraphError("arc entries must be [tail, head] pairs");
        g.add_arc(arc[0].get<std::string>(), arc[1].get<std::string>());
    }
    if (j.contains("environment"))
        for (auto it = j["environment"].begin(); it != j["environment"].end(); ++it) {
            std::string role = it.value().get<std::string>();
            EnvRole r = role == "entry"  ? EnvRole::Entry
                        : role == "exit" ? EnvRole::Exit
                                         : EnvRole::Environment;
            g.set_environment(g.vertex(it.key()), r);
        }
    for (const char* key : {"entries", "exits"})
        if (j.contains(key))
            for (const auto& name : j[key])
                g.set_environment(g.vertex(name.get<std::string>()),
                                  std::string(key) == "entries" ? EnvRole::Entry
                                                                : EnvRole::Exit);
    return g;
}

std::string aco_instance_to_json(const AcoInstance& inst) {
    ordered_json j = ordered_json::parse(graph_to_json(inst.graph));
    j["lengths"] = inst.lengths;
    j["heuristic"] = inst.heuristic;
    j["colony"] = inst.graph.name(inst.colony);
    j["food"] = inst.graph.name(inst.food);
    j["params"] = {{"payload", inst.params.payload_q},
                   {"evaporation", inst.params.evaporation},
                   {"pheromone_exp", inst.params.pheromone_exp},
                   {"heuristic_exp", inst.params.heuristic_exp},
                   {"pheromone_floor", inst.params.pheromone_floor},
                   {"ants", inst.params.ants}};
    return j.dump(2);
}

AcoInstance aco_instance_from_json(const std::string& text) {
    auto j = json::parse(text);
    AcoInstance inst;
    inst.graph = graph_from_json(text);
    inst.lengths = j.at("lengths").get<std::vector<double>>();
    if (static_cast<int>(inst.lengths.size()) != inst.graph.arc_count())
        throw GraphError("lengths must cover every arc");
    if (j.contains("heuristic"))
        inst.heuristic = j["heuristic"].get<std::vector<double>>();
    else {
        inst.heuristic.reserve(inst.lengths.size());
        for (double l : inst.lengths) inst.heuristic.push_back(1.0 / l);
    }
    inst.pheromone.assign(inst.graph.arc_count(), 0.0);
    inst.colony = inst.graph.vertex(j.at("colony").get<std::string>());
    inst.food = inst.graph.vertex(j.at("food").get<std::string>());
    if (j.contains("params")) {
        const auto& p = j["params"];
        inst.params.payload_q = p.value("payload", 1.0);
        inst.params.evaporation = p.value("evaporation", 0.1);
        inst.params.pheromone_exp = p.value("pheromone_exp", 1.0);
        inst.params.heuristic_exp = p.value("heuristic_exp", 1.0);
        inst.params.pheromone_floor = p.value("pheromone_floor", 0.1);
        inst.params.ants = p.value("ants", 20);
    }
    return inst;
}

std::string feedback_report_to_json(const DirectedGraph& g, const FeedbackReport& report) {
    ordered_json j;
    ordered_json walk;
    walk["vertices"] = json::array();
    for (Vertex v : report.walk.vertices) walk["vertices"].push_back(g.name(v));
    walk["arcs"] = report.walk.arcs;
    j["walk"] = walk;
    j["samples_used"] = report.samples_used;
    j["is_feedback_loop"] = report.is_feedback_loop;
    j["worst_slack"] = report.worst_slack();
    ordered_json verdicts = json::array();
    for (const auto& v : report.verdicts)
        verdicts.push_back({{"agent", g.name(v.vertex)},
                            {"passed", v.passed},
                            {"worst_slack", v.worst_slack}});
    j["verdicts"] = verdicts;
    if (report.is_coherent) j["is_coherent"] = *report.is_coherent;
    if (report.robustness_passed) j["robustness_passed"] = *report.robustness_passed;
    if (report.is_pattern) {
        j["is_pattern"] = *report.is_pattern;
        j["stability_radius"] = report.stability_radius;
    }
    return j.dump(2);
}

std::string separation_report_to_json(const SeparationReport& report) {
    ordered_json j;
    j["epsilon"] = report.epsilon;
    j["entry_time"] = report.entry_time;
    j["violation_times"] = report.violation_times;
    j["samples"] = report.times.size();
    return j.dump(2);
}

} // namespace cognet
