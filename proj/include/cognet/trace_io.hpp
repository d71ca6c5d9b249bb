#pragma once
// CSV trace writers and run summaries. Summaries are byte-stable for a given
// seed: timestamps live in a separate metadata file.

#include "cognet/aco.hpp"
#include "cognet/network.hpp"
#include "cognet/pattern.hpp"
#include "cognet/propagation.hpp"

#include <string>
#include <vector>

namespace cognet {

// Canonical float formatting used by every CSV writer (shortest round-trip).
std::string format_double(double v);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

// (event_index, time, agent, arc, value...) rows for an asynchronous run.
std::string async_trace_csv(const Network& net, const AsyncRun& run);

// (time, distance, epsilon) rows of the separation series.
std::string separation_csv(const SeparationReport& report);

// (step, agent, param_index, value) rows of the state trace.
std::string state_trace_csv(const Network& net, const std::vector<AgentStates>& trace);

// (iteration, best_length, modal_path_mass, total_pheromone) per iteration.
std::string colony_csv(const ColonyTrace& trace);

// (t, series, value) tidy rows for one named series in a run directory.
// Throws ConfigError listing the available series when the name is unknown.
std::string plotdata_csv(const std::string& run_dir, const std::string& series);
std::vector<std::string> plotdata_series(const std::string& run_dir);

} // namespace cognet
