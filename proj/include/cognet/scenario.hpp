#pragma once
// Scenario loading: a small TOML subset (sections, array-of-table sections,
// key = string/number/bool/array, comments) plus the typed Scenario the CLI
// runs. Machine outputs stay JSON; scenarios are the human-edited side.

#include "cognet/feedback.hpp"
#include "cognet/market.hpp"
#include "cognet/network.hpp"
#include "cognet/pattern.hpp"
#include "cognet/propagation.hpp"

#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace cognet {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct TomlValue;
using TomlArray = std::vector<TomlValue>;

struct TomlTable {
    std::map<std::string, TomlValue> entries;
    std::map<std::string, TomlTable> tables;
    std::map<std::string, std::vector<TomlTable>> table_arrays;

    bool has(const std::string& key) const;
    const TomlValue& at(const std::string& key) const;
    double number(const std::string& key, double fallback) const;
    double require_number(const std::string& key) const;
    std::string text(const std::string& key, const std::string& fallback) const;
    std::string require_text(const std::string& key) const;
    bool boolean(const std::string& key, bool fallback) const;
    std::vector<double> numbers(const std::string& key) const;
};

struct TomlValue {
    std::variant<double, bool, std::string, TomlArray> data;

    bool is_number() const { return std::holds_alternative<double>(data); }
    bool is_text() const { return std::holds_alternative<std::string>(data); }
    bool is_bool() const { return std::holds_alternative<bool>(data); }
    bool is_array() const { return std::holds_alternative<TomlArray>(data); }
    double as_number() const;
    const std::string& as_text() const;
    bool as_bool() const;
    const TomlArray& as_array() const;
};

TomlTable parse_toml(const std::string& text);

// --- typed scenario ----------------------------------------------------

struct AgentScenario {
    std::string vertex;
    std::string family = "affine"; // affine | constant | logistic
    std::vector<double> bias, weights; // row-major
    double logistic_lo = 0.0, logistic_hi = 1.0, logistic_gain = 1.0;
    std::string utility = "none"; // none | bilinear | neg_bilinear | target
    double target = 0.0;
    bool frozen = false;
    std::vector<double> param_lo, param_hi;
};

struct Scenario {
    std::string kind; // generic | mlp | aco | market
    std::uint64_t seed = 1;
    std::string out_dir = "out";
    std::string base_dir; // directory of the scenario file

    // generic
    std::string graph_file;
    std::string space_kind = "reals"; // reals | set | distribution
    int space_width = 1;
    std::vector<std::string> space_labels;
    std::vector<AgentScenario> agents;
    PropagationConfig prop;
    double horizon = 10.0; // asynchronous run length
    bool has_pattern = false;
    PatternConfig pattern;
    int coupled_steps = 0;
    FeedbackCheckConfig feedback;

    // mlp
    std::vector<int> mlp_layers;
    std::string mlp_data_file;
    double mlp_eta = 0.5;
    int mlp_steps = 1000;

    // aco
    std::string aco_instance_file;
    int aco_iterations = 100;

    // market
    MarketSpec market;
    int market_steps = 0; // pattern steps after the first tatonnement
    double market_L = 0.0;
    double market_delta = 1.0;
};

Scenario load_scenario(const std::string& path);

// Build the generic network named by the scenario (graph file + agents).
Network build_generic_network(const Scenario& sc);

} // namespace cognet
