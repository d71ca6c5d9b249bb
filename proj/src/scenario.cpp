#include "cognet/scenario.hpp"

#include "cognet/json_io.hpp"

#include <cctype>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace cognet {

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

// strips a trailing comment that is not inside a string
std::string strip_comment(const std::string& s) {
    bool in_str = false;
    for (size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '"' && (i == 0 || s[i - 1] != '\\')) in_str = !in_str;
        if (s[i] == '#' && !in_str) return s.substr(0, i);
    }
    return s;
}

class ValueParser {
public:
    explicit ValueParser(const std::string& text) : s_(text) {}

    TomlValue parse() {
        TomlValue v = value();
        skip_ws();
        if (pos_ != s_.size()) throw ConfigError("trailing characters in value: " + s_);
        return v;
    }

private:
    void skip_ws() {
        while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
    }

    TomlValue value() {
        skip_ws();
        if (pos_ >= s_.size()) throw ConfigError("empty value");
        char c = s_[pos_];
        if (c == '"') return {string_lit()};
        if (c == '[') return {array_lit()};
        if (s_.compare(pos_, 4, "true") == 0 && boundary(pos_ + 4)) {
            pos_ += 4;
            return {true};
        }
        if (s_.compare(pos_, 5, "false") == 0 && boundary(pos_ + 5)) {
            pos_ += 5;
            return {false};
        }
        return {number_lit()};
    }

    bool boundary(size_t p) const {
        return p >= s_.size() || !std::isalnum(static_cast<unsigned char>(s_[p]));
    }

    std::string string_lit() {
        ++pos_; // opening quote
        std::string out;
        while (pos_ < s_.size() && s_[pos_] != '"') {
            if (s_[pos_] == '\\' && pos_ + 1 < s_.size()) {
                ++pos_;
                switch (s_[pos_]) {
                case 'n': out.push_back('\n'); break;
                case 't': out.push_back('\t'); break;
                case '"': out.push_back('"'); break;
                case '\\': out.push_back('\\'); break;
                default: throw ConfigError("unsupported escape in string");
                }
            } else {
                out.push_back(s_[pos_]);
            }
            ++pos_;
        }
        if (pos_ >= s_.size()) throw ConfigError("unterminated string");
        ++pos_; // closing quote
        return out;
    }

    double number_lit() {
        size_t start = pos_;
        while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) ||
                                    strchr("+-._eE", s_[pos_])))
            ++pos_;
        std::string tok = s_.substr(start, pos_ - start);
        std::string clean;
        for (char c : tok)
            if (c != '_') clean.push_back(c);
        try {
            size_t used = 0;
            double v = std::stod(clean, &used);
            if (used != clean.size()) throw ConfigError("bad number: " + tok);
            return v;
        } catch (const std::exception&) {
            throw ConfigError("bad number: " + tok);
        }
    }

    TomlArray array_lit() {
        ++pos_; // [
        TomlArray arr;
        skip_ws();
        while (pos_ < s_.size() && s_[pos_] != ']') {
            arr.push_back(value());
            skip_ws();
            if (pos_ < s_.size() && s_[pos_] == ',') {
                ++pos_;
                skip_ws();
            }
        }
        if (pos_ >= s_.size()) throw ConfigError("unterminated array");
        ++pos_; // ]
        return arr;
    }

    const std::string& s_;
    size_t pos_ = 0;
};

TomlTable* descend(TomlTable& root, const std::string& dotted, bool array_section) {
    TomlTable* at = &root;
    std::istringstream parts(dotted);
    std::vector<std::string> names;
    std::string name;
    while (std::getline(parts, name, '.')) names.push_back(trim(name));
    for (size_t i = 0; i < names.size(); ++i) {
        if (names[i].empty()) throw ConfigError("empty section name in [" + dotted + "]");
        bool last = i + 1 == names.size();
        if (last && array_section) {
            at->table_arrays[names[i]].emplace_back();
            at = &at->table_arrays[names[i]].back();
        } else if (!last && at->table_arrays.count(names[i])) {
            at = &at->table_arrays[names[i]].back();
        } else {
            at = &at->tables[names[i]];
        }
    }
    return at;
}

} // namespace

double TomlValue::as_number() const {
    if (!is_number()) throw ConfigError("expected a number");
    return std::get<double>(data);
}

const std::string& TomlValue::as_text() const {
    if (!is_text()) throw ConfigError("expected a string");
    return std::get<std::string>(data);
}

bool TomlValue::as_bool() const {
    if (!is_bool()) throw ConfigError("expected a boolean");
    return std::get<bool>(data);
}

const TomlArray& TomlValue::as_array() const {
    if (!is_array()) throw ConfigError("expected an array");
    return std::get<TomlArray>(data);
}

bool TomlTable::has(const std::string& key) const { return entries.count(key) > 0; }

const TomlValue& TomlTable::at(const std::string& key) const {
    auto it = entries.find(key);
    if (it == entries.end()) throw ConfigError("missing key: " + key);
    return it->second;
}

double TomlTable::number(const std::string& key, double fallback) const {
    return has(key) ? at(key).as_number() : fallback;
}

double TomlTable::require_number(const std::string& key) const { return at(key).as_number(); }

std::string TomlTable::text(const std::string& key, const std::string& fallback) const {
    return has(key) ? at(key).as_text() : fallback;
}

std::string TomlTable::require_text(const std::string& key) const { return at(key).as_text(); }

bool TomlTable::boolean(const std::string& key, bool fallback) const {
    return has(key) ? at(key).as_bool() : fallback;
}

std::vector<double> TomlTable::numbers(const std::string& key) const {
    std::vector<double> out;
    if (!has(key)) return out;
    const TomlValue& v = at(key);
    if (v.is_number()) {
        out.push_back(v.as_number());
        return out;
    }
    for (const auto& item : v.as_array()) out.push_back(item.as_number());
    return out;
}

TomlTable parse_toml(const std::string& text) {
    TomlTable root;
    TomlTable* current = &root;
    std::istringstream stream(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(stream, raw)) {
        ++line_no;
        std::string line = trim(strip_comment(raw));
        if (line.empty()) continue;
        try {
            if (line.front() == '[') {
                bool array_section = line.size() > 1 && line[1] == '[';
                size_t close = line.find(array_section ? "]]" : "]");
                if (close == std::string::npos)
                    throw ConfigError("unterminated section header");
                std::string name =
                    trim(line.substr(array_section ? 2 : 1, close - (array_section ? 2 : 1)));
                current = descend(root, name, array_section);
                continue;
            }
            size_t eq = line.find('=');
            if (eq == std::string::npos) throw ConfigError("expected key = value");
            std::string key = trim(line.substr(0, eq));
            if (key.empty()) throw ConfigError("empty key");
            current->entries[key] = ValueParser(trim(line.substr(eq + 1))).parse();
        } catch (const ConfigError& e) {
            throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return root;
}

namespace {

ExecPolicy default_exec() {
    return effective_threads() > 1 ? ExecPolicy::OpenMP : ExecPolicy::Serial;
}

void load_propagation(const TomlTable& t, PropagationConfig& cfg) {
    std::string mode = t.text("mode", "synchronous");
    if (mode == "synchronous") cfg.mode = PropagationMode::Synchronous;
    else if (mode == "asynchronous") cfg.mode = PropagationMode::Asynchronous;
    else throw ConfigError("unknown propagation mode: " + mode);
    cfg.poisson_rate = t.number("poisson_rate", cfg.poisson_rate);
    cfg.tolerance = t.number("tolerance", cfg.tolerance);
    cfg.max_iterations = static_cast<int>(t.number("max_iterations", cfg.max_iterations));
    cfg.divergence_patience =
        static_cast<int>(t.number("divergence_patience", cfg.divergence_patience));
}

AgentScenario load_agent(const TomlTable& t) {
    AgentScenario a;
    a.vertex = t.require_text("vertex");
    a.family = t.text("family", "affine");
    a.bias = t.numbers("bias");
    a.weights = t.numbers("weights");
    if (t.has("weight")) a.weights = t.numbers("weight");
    a.logistic_lo = t.number("lo", 0.0);
    a.logistic_hi = t.number("hi", 1.0);
    a.logistic_gain = t.number("gain", 1.0);
    a.utility = t.text("utility", "none");
    a.target = t.number("target", 0.0);
    a.frozen = t.boolean("frozen", false);
    a.param_lo = t.numbers("param_lo");
    a.param_hi = t.numbers("param_hi");
    return a;
}

} // namespace

Scenario load_scenario(const std::string& path) {
    TomlTable root = parse_toml(read_file(path));
    Scenario sc;
    sc.base_dir = std::filesystem::path(path).parent_path().string();

    auto sit = root.tables.find("scenario");
    if (sit == root.tables.end()) throw ConfigError("missing [scenario] section");
    const TomlTable& s = sit->second;
    sc.kind = s.require_text("kind");
    sc.seed = static_cast<std::uint64_t>(s.number("seed", 1));
    sc.out_dir = s.text("out", "out");
    sc.graph_file = s.text("graph", "");

    sc.prop.exec = default_exec();
    sc.prop.rng_seed = sc.seed;
    if (auto it = root.tables.find("propagation"); it != root.tables.end()) {
        load_propagation(it->second, sc.prop);
        sc.horizon = it->second.number("horizon", sc.horizon);
    }

    if (auto it = root.tables.find("space"); it != root.tables.end()) {
        sc.space_kind = it->second.text("kind", "reals");
        sc.space_width = static_cast<int>(it->second.number("width", 1));
        if (it->second.has("labels"))
            for (const auto& v : it->second.at("labels").as_array())
                sc.space_labels.push_back(v.as_text());
    }

    if (auto it = root.tables.find("pattern"); it != root.tables.end()) {
        sc.has_pattern = true;
        sc.pattern.lipschitz_L = it->second.number("L", 0.1);
        sc.pattern.delta = it->second.number("delta", 1.0);
        sc.pattern.candidate_count = static_cast<int>(it->second.number("candidates", 8));
        sc.pattern.rng_seed = sc.seed;
        sc.pattern.exec = default_exec();
        sc.pattern.probe.lo = it->second.number("probe_lo", 0.0);
        sc.pattern.probe.hi = it->second.number("probe_hi", 1.0);
        sc.pattern.probe.count = static_cast<int>(it->second.number("probe_count", 16));
        sc.coupled_steps = static_cast<int>(it->second.number("steps", 100));
    }

    if (auto it = root.tables.find("feedback"); it != root.tables.end()) {
        sc.feedback.epsilon = it->second.number("epsilon", 0.5);
        sc.feedback.samples = static_cast<int>(it->second.number("samples", 64));
        sc.feedback.seed = sc.seed;
    }

    for (const auto& at : root.table_arrays["agent"]) sc.agents.push_back(load_agent(at));

    if (sc.kind == "mlp") {
        auto it = root.tables.find("mlp");
        if (it == root.tables.end()) throw ConfigError("mlp scenario needs an [mlp] section");
        for (double v : it->second.numbers("layers"))
            sc.mlp_layers.push_back(static_cast<int>(v));
        sc.mlp_data_file = it->second.require_text("data");
        sc.mlp_eta = it->second.number("eta", 0.5);
        sc.mlp_steps = static_cast<int>(it->second.number("steps", 1000));
    } else if (sc.kind == "aco") {
        auto it = root.tables.find("aco");
        if (it == root.tables.end()) throw ConfigError("aco scenario needs an [aco] section");
        sc.aco_instance_file = it->second.require_text("instance");
        sc.aco_iterations = static_cast<int>(it->second.number("iterations", 100));
    } else if (sc.kind == "market") {
        auto it = root.tables.find("market");
        if (it == root.tables.end())
            throw ConfigError("market scenario needs a [market] section");
        const TomlTable& m = it->second;
        if (m.table_arrays.count("entry"))
            for (const auto& e : m.table_arrays.at("entry"))
                sc.market.entries.push_back({e.require_text("name"), e.number("price", 0.0)});
        if (m.table_arrays.count("niche"))
            for (const auto& n : m.table_arrays.at("niche")) {
                NicheSpec ns;
                ns.name = n.require_text("name");
                ns.c0 = n.number("c0", 1.0);
                ns.s = n.number("s", 0.0);
                ns.kappa = n.number("kappa", 1.0);
                ns.producer_count = n.number("count", 1.0);
                ns.count_max = n.number("count_max", ns.count_max);
                sc.market.niches.push_back(ns);
            }
        if (m.table_arrays.count("exit"))
            for (const auto& x : m.table_arrays.at("exit"))
                sc.market.exits.push_back(
                    {x.require_text("name"), x.number("a", 1.0), x.number("b", 1.0)});
        if (m.table_arrays.count("arc"))
            for (const auto& a : m.table_arrays.at("arc"))
                sc.market.arcs.push_back({a.require_text("tail"), a.require_text("head"),
                                          a.number("recipe", 1.0)});
        if (auto rit = m.tables.find("run"); rit != m.tables.end()) {
            sc.market_steps = static_cast<int>(rit->second.number("steps", 0));
            sc.market_L = rit->second.number("L", 0.0);
            sc.market_delta = rit->second.number("delta", 1.0);
        }
    } else if (sc.kind != "generic") {
        throw ConfigError("unknown scenario kind: " + sc.kind);
    }
    return sc;
}

Network build_generic_network(const Scenario& sc) {
    if (sc.graph_file.empty()) throw ConfigError("generic scenario needs graph = \"...\"");
    std::filesystem::path gp = sc.graph_file;
    if (gp.is_relative() && !sc.base_dir.empty())
        gp = std::filesystem::path(sc.base_dir) / gp;
    DirectedGraph g = graph_from_json(read_file(gp.string()));

    SpacePtr space;
    if (sc.space_kind == "reals")
        space = std::make_shared<SignalSpace>(SignalSpace::reals(sc.space_width));
    else if (sc.space_kind == "set")
        space = std::make_shared<SignalSpace>(SignalSpace::finite_set(sc.space_labels));
    else if (sc.space_kind == "distribution")
        space = std::make_shared<SignalSpace>(SignalSpace::distribution(sc.space_labels));
    else
        throw ConfigError("unknown space kind: " + sc.space_kind);

    Network net(std::move(g), space);

    for (const auto& spec : sc.agents) {
        auto vid = net.graph().find(spec.vertex);
        if (!vid) throw ConfigError("agent names unknown vertex: " + spec.vertex);
        const int n_in = static_cast<int>(net.graph().in_arcs(*vid).size()) * net.width();
        const int n_out = static_cast<int>(net.graph().out_arcs(*vid).size()) * net.width();

        Agent a;
        a.family = spec.family;
        a.frozen = spec.frozen || net.graph().is_environment(*vid);
        if (spec.family == "affine" || spec.family == "logistic") {
            std::vector<double> params;
            if (spec.bias.size() == 1)
                params.assign(n_out, spec.bias[0]); // scalar broadcast
            else {
                params = spec.bias;
                params.resize(n_out, 0.0);
            }
            std::vector<double> w(spec.weights);
            w.resize(static_cast<size_t>(n_out) * n_in,
                     spec.weights.size() == 1 ? spec.weights[0] : 0.0);
            params.insert(params.end(), w.begin(), w.end());
            a.params = std::move(params);
            a.eval = spec.family == "affine"
                         ? make_affine_eval(n_in, n_out)
                         : make_logistic_eval(n_in, n_out, spec.logistic_lo,
                                              spec.logistic_hi, spec.logistic_gain);
            if (spec.family == "affine")
                a.declared_alpha = affine_alpha(a.params, n_in, n_out);
        } else if (spec.family == "constant") {
            a.params = spec.bias;
            a.params.resize(n_out, spec.bias.size() == 1 ? spec.bias[0] : 0.0);
            a.eval = make_constant_eval(n_out);
            a.declared_alpha = 0.0;
        } else {
            throw ConfigError("unknown agent family: " + spec.family);
        }
        if (spec.utility == "bilinear") a.utility = make_bilinear_utility(1.0);
        else if (spec.utility == "neg_bilinear") a.utility = make_bilinear_utility(-1.0);
        else if (spec.utility == "target") a.utility = make_target_utility(spec.target);
        else if (spec.utility != "none")
            throw ConfigError("unknown utility: " + spec.utility);
        a.param_lo = spec.param_lo;
        a.param_hi = spec.param_hi;
        net.set_agent(*vid, std::move(a));
    }
    net.validate();
    return net;
}

} // namespace cognet
