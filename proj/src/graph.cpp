#include "cognet/graph.hpp"

namespace cognet {

Vertex DirectedGraph::add_vertex(const std::string& name) {
    if (index_.count(name))
        throw GraphError("duplicate vertex name: " + name);
    Vertex v = vertex_count();
    names_.push_back(name);
    index_[name] = v;
    in_.emplace_back();
    out_.emplace_back();
    env_.push_back(EnvRole::NotEnvironment);
    return v;
}

ArcId DirectedGraph::add_arc(Vertex tail, Vertex head) {
    check_vertex(tail);
    check_vertex(head);
    if (tail == head)
        throw GraphError("self-loop rejected at vertex " + names_[tail]);
    ArcId e = arc_count();
    arcs_.push_back({tail, head});
    out_[tail].push_back(e);
    in_[head].push_back(e);
    return e;
}

ArcId DirectedGraph::add_arc(const std::string& tail, const std::string& head) {
    return add_arc(vertex(tail), vertex(head));
}

void DirectedGraph::set_environment(Vertex v, EnvRole role) {
    check_vertex(v);
    env_[v] = role;
}

std::optional<Vertex> DirectedGraph::find(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

Vertex DirectedGraph::vertex(const std::string& name) const {
    auto v = find(name);
    if (!v) throw GraphError("unknown vertex: " + name);
    return *v;
}

EnvRole DirectedGraph::env_role(Vertex v) const {
    check_vertex(v);
    return env_[v];
}

std::span<const ArcId> DirectedGraph::in_arcs(Vertex v) const {
    check_vertex(v);
    return in_[v];
}

std::span<const ArcId> DirectedGraph::out_arcs(Vertex v) const {
    check_vertex(v);
    return out_[v];
}

std::pair<std::span<const ArcId>, std::span<const ArcId>>
DirectedGraph::incidence(Vertex v) const {
    return {in_arcs(v), out_arcs(v)};
}

void DirectedGraph::check_vertex(Vertex v) const {
    if (!has_vertex(v))
        throw GraphError("unknown vertex id " + std::to_string(v));
}

} // namespace cognet
