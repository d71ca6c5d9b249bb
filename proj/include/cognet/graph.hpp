#pragma once
// Directed-graph substrate: named vertices, indexed arcs, incidence maps,
// environment flags.

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace cognet {

using Vertex = int;
using ArcId = int;

struct Arc {
    Vertex tail = -1;
    Vertex head = -1;
    bool operator==(const Arc&) const = default;
};

// Role of an environment vertex. Plain agents are NotEnvironment.
enum class EnvRole { NotEnvironment, Environment, Entry, Exit };

class GraphError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Vertices are registered by name and addressed by dense index.
// Arc identifiers are zero-based positions in the arc list; parallel arcs
// are permitted, self-loops are not.
class DirectedGraph {
public:
    Vertex add_vertex(const std::string& name);
    ArcId add_arc(Vertex tail, Vertex head);
    ArcId add_arc(const std::string& tail, const std::string& head);
    void set_environment(Vertex v, EnvRole role);

    int vertex_count() const { return static_cast<int>(names_.size()); }
    int arc_count() const { return static_cast<int>(arcs_.size()); }

    const std::string& name(Vertex v) const { return names_.at(v); }
    std::optional<Vertex> find(const std::string& name) const;
    Vertex vertex(const std::string& name) const; // throws if unknown
    const Arc& arc(ArcId e) const { return arcs_.at(e); }
    const std::vector<Arc>& arcs() const { return arcs_; }

    EnvRole env_role(Vertex v) const;
    bool is_environment(Vertex v) const { return env_role(v) != EnvRole::NotEnvironment; }

    // T(v): arcs with head v (inputs). F(v): arcs with tail v (outputs).
    std::span<const ArcId> in_arcs(Vertex v) const;
    std::span<const ArcId> out_arcs(Vertex v) const;
    std::pair<std::span<const ArcId>, std::span<const ArcId>> incidence(Vertex v) const;

    bool has_vertex(Vertex v) const { return v >= 0 && v < vertex_count(); }

private:
    void check_vertex(Vertex v) const;

    std::vector<std::string> names_;
    std::unordered_map<std::string, Vertex> index_;
    std::vector<Arc> arcs_;
    std::vector<std::vector<ArcId>> in_, out_;
    std::vector<EnvRole> env_;
};

} // namespace cognet
