#include "cognet/trace_io.hpp"

#include "cognet/scenario.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace cognet {

std::string format_double(double v) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) return "nan";
    return std::string(buf, end);
}

void write_text_file(const std::string& path, const std::string& content) {
    std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write file: " + path);
    out << content;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string async_trace_csv(const Network& net, const AsyncRun& run) {
    std::ostringstream out;
    out << "event_index,time,agent,arc";
    for (int c = 0; c < net.width(); ++c) out << ",value" << c;
    out << "\n";
    const int w = net.width();
    for (size_t i = 0; i < run.events.size(); ++i) {
        const auto& ev = run.events[i];
        if (run.states.size() != run.events.size()) continue;
        const auto& state = run.states[i];
        for (ArcId e : net.graph().out_arcs(ev.agent)) {
            out << i << ',' << format_double(ev.time) << ','
                << net.graph().name(ev.agent) << ',' << e;
            for (int c = 0; c < w; ++c) out << ',' << format_double(state[e * w + c]);
            out << "\n";
        }
    }
    return out.str();
}

std::string separation_csv(const SeparationReport& report) {
    std::ostringstream out;
    out << "time,distance,epsilon\n";
    for (size_t i = 0; i < report.times.size(); ++i)
        out << format_double(report.times[i]) << ',' << format_double(report.distances[i])
            << ',' << format_double(report.epsilon) << "\n";
    return out.str();
}

std::string state_trace_csv(const Network& net, const std::vector<AgentStates>& trace) {
    std::ostringstream out;
    out << "step,agent,param_index,value\n";
    for (size_t step = 0; step < trace.size(); ++step)
        for (size_t v = 0; v < trace[step].size(); ++v)
            for (size_t k = 0; k < trace[step][v].size(); ++k)
                out << step + 1 << ',' << net.graph().name(static_cast<Vertex>(v)) << ','
                    << k << ',' << format_double(trace[step][v][k]) << "\n";
    return out.str();
}

std::string colony_csv(const ColonyTrace& trace) {
    std::ostringstream out;
    out << "iteration,best_length,modal_path_mass,total_pheromone\n";
    for (size_t i = 0; i < trace.iterations.size(); ++i) {
        const auto& it = trace.iterations[i];
        out << i + 1 << ',' << format_double(it.best_length) << ','
            << format_double(it.modal_mass) << ',' << format_double(it.total_pheromone)
            << "\n";
    }
    return out.str();
}

namespace {

// series name -> (file, time column, value column)
const std::map<std::string, std::array<std::string, 3>>& series_catalog() {
    static const std::map<std::string, std::array<std::string, 3>> catalog = {
        {"separation", {"separation.csv", "time", "distance"}},
        {"epsilon", {"separation.csv", "time", "epsilon"}},
        {"best_length", {"colony.csv", "iteration", "best_length"}},
        {"modal_path_mass", {"colony.csv", "iteration", "modal_path_mass"}},
        {"total_pheromone", {"colony.csv", "iteration", "total_pheromone"}},
        {"train_error", {"training.csv", "step", "error"}},
        {"price", {"market.csv", "iteration", "price"}},
        {"volume", {"market.csv", "iteration", "volume"}},
        {"producer_count", {"market.csv", "iteration", "count"}},
    };
    return catalog;
}

std::vector<std::vector<std::string>> read_csv(const std::string& path) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream stream(read_text_file(path));
    std::string line;
    while (std::getline(stream, line)) {
        if (line.empty()) continue;
        std::vector<std::string> row;
        std::istringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) row.push_back(cell);
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace

std::vector<std::string> plotdata_series(const std::string& run_dir) {
    std::vector<std::string> names;
    for (const auto& [name, loc] : series_catalog())
        if (std::filesystem::exists(std::filesystem::path(run_dir) / loc[0]))
            names.push_back(name);
    return names;
}

std::string plotdata_csv(const std::string& run_dir, const std::string& series) {
    auto available = plotdata_series(run_dir);
    auto it = series_catalog().find(series);
    if (it == series_catalog().end() ||
        std::find(available.begin(), available.end(), series) == available.end()) {
        std::string msg = "unknown series '" + series + "'; available:";
        if (available.empty()) msg += " (none — run directory has no traces)";
        for (const auto& name : available) msg += " " + name;
        throw ConfigError(msg);
    }
    auto rows = read_csv((std::filesystem::path(run_dir) / it->second[0]).string());
    if (rows.empty()) throw ConfigError("empty trace file: " + it->second[0]);
    const auto& header = rows.front();
    int tcol = -1, vcol = -1;
    for (size_t c = 0; c < header.size(); ++c) {
        if (header[c] == it->second[1]) tcol = static_cast<int>(c);
        if (header[c] == it->second[2]) vcol = static_cast<int>(c);
    }
    if (tcol < 0 || vcol < 0)
        throw ConfigError("trace file lacks expected columns: " + it->second[0]);
    std::ostringstream out;
    out << "t,series,value\n";
    for (size_t r = 1; r < rows.size(); ++r) {
        if (static_cast<int>(rows[r].size()) <= std::max(tcol, vcol)) continue;
        out << rows[r][tcol] << ',' << series << ',' << rows[r][vcol] << "\n";
    }
    return out.str();
}

} // namespace cognet
