#pragma once
// JSON interchange: graphs, ACO instances, reports, run summaries.

#include "cognet/aco.hpp"
#include "cognet/feedback.hpp"
#include "cognet/graph.hpp"
#include "cognet/pattern.hpp"

#include <string>

namespace cognet {

// {"vertices":[...], "arcs":[[tail,head],...], "environment":{v:"entry"|"exit"}}
// Two-way graphs may use "entries":[...] and "exits":[...] instead.
std::string graph_to_json(const DirectedGraph& g);
DirectedGraph graph_from_json(const std::string& text);

// Graph JSON plus {"lengths":[...], "colony":v, "food":v, "params":{...}}.
std::string aco_instance_to_json(const AcoInstance& inst);
AcoInstance aco_instance_from_json(const std::string& text);

std::string feedback_report_to_json(const DirectedGraph& g, const FeedbackReport& report);
std::string separation_report_to_json(const SeparationReport& report);

} // namespace cognet
