// cognet — scenario-driven front end for the cognitive-network engine.
// Subcommands: run, detect, plotdata, profile, oracle.
// Exit codes: 0 success, 2 propagation diverged, 3 configuration error.

#include "cognet/json_io.hpp"
#include "cognet/market.hpp"
#include "cognet/mlp.hpp"
#include "cognet/rng.hpp"
#include "cognet/scenario.hpp"
#include "cognet/trace_io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <iostream>

using namespace cognet;
using nlohmann::ordered_json;

namespace {

struct GlobalOptions {
    std::optional<std::uint64_t> seed;
    std::string out_override;
    bool quiet = false;
};

void info(const GlobalOptions& g, const std::string& line) {
    if (!g.quiet) std::cout << line << "\n";
}

std::string out_dir_for(const Scenario& sc, const GlobalOptions& g) {
    std::string dir = g.out_override.empty() ? sc.out_dir : g.out_override;
    std::filesystem::path p(dir);
    if (p.is_relative() && !sc.base_dir.empty())
        p = std::filesystem::path(sc.base_dir) / p;
    return p.string();
}

void write_metadata(const std::string& dir) {
    ordered_json meta;
    meta["written_at_unix"] =
        std::chrono::duration_cast<std::chrono::seconds>(
            std::chrono::system_clock::now().time_since_epoch())
            .count();
    write_text_file(dir + "/metadata.json", meta.dump(2) + "\n");
}

Scenario load_with_overrides(const std::string& path, const GlobalOptions& g) {
    Scenario sc = load_scenario(path);
    if (g.seed) {
        sc.seed = *g.seed;
        sc.prop.rng_seed = *g.seed;
        sc.pattern.rng_seed = *g.seed;
        sc.feedback.seed = *g.seed;
    }
    return sc;
}

std::string resolve(const Scenario& sc, const std::string& file) {
    std::filesystem::path p(file);
    if (p.is_relative() && !sc.base_dir.empty())
        p = std::filesystem::path(sc.base_dir) / p;
    return p.string();
}

int run_generic(const Scenario& sc, const GlobalOptions& g) {
    Network net = build_generic_network(sc);
    std::string dir = out_dir_for(sc, g);
    ordered_json summary;
    summary["kind"] = "generic";
    summary["seed"] = sc.seed;

    if (sc.has_pattern && sc.coupled_steps > 0) {
        Network sim = net;
        CoupledRunOptions opts;
        opts.steps = sc.coupled_steps;
        CoupledRun run = run_coupled(sim, sc.prop, sc.pattern, opts);
        write_text_file(dir + "/separation.csv", separation_csv(run.report));
        write_text_file(dir + "/states.csv", state_trace_csv(net, run.state_trace));
        write_text_file(dir + "/separation.json",
                        separation_report_to_json(run.report) + "\n");
        summary["steps"] = sc.coupled_steps;
        summary["epsilon"] = run.report.epsilon;
        summary["entry_time"] = run.report.entry_time;
        summary["violations"] = run.report.violation_times.size();
        summary["final_distance"] =
            run.report.distances.empty() ? 0.0 : run.report.distances.back();
        info(g, "coupled run: " + std::to_string(sc.coupled_steps) + " steps, " +
                    std::to_string(run.report.violation_times.size()) + " violations");
    } else {
        AggregateResult agg = solve_aggregate(net, net.zero_state(), sc.prop);
        summary["converged"] = agg.converged;
        summary["residual"] = agg.residual;
        summary["iterations"] = agg.iterations_used;
        if (sc.prop.mode == PropagationMode::Asynchronous) {
            PropagationConfig rec = sc.prop;
            AsyncRun ar = run_asynchronous(net, net.zero_state(), rec, sc.horizon, true);
            write_text_file(dir + "/trace.csv", async_trace_csv(net, ar));
            summary["events"] = ar.events.size();
            if (ar.cover.count > 0) {
                summary["cover_mean"] = ar.cover.mean;
                summary["cover_median"] = ar.cover.median;
            }
        }
        info(g, "aggregate residual " + format_double(agg.residual) + " after " +
                    std::to_string(agg.iterations_used) + " iterations");
    }
    write_text_file(dir + "/summary.json", summary.dump(2) + "\n");
    write_metadata(dir);
    return 0;
}

int run_mlp(const Scenario& sc, const GlobalOptions& g) {
    Perceptron p = Perceptron::random(sc.mlp_layers, 0, sc.seed);
    load_training_csv(p, read_text_file(resolve(sc, sc.mlp_data_file)));
    std::string dir = out_dir_for(sc, g);

    std::ostringstream curve;
    curve << "step,error\n";
    int stride = std::max(1, sc.mlp_steps / 200);
    double err = 0.0;
    for (int step = 0; step < sc.mlp_steps; ++step) {
        err = train_epoch(p, sc.mlp_eta);
        if (step % stride == 0 || step + 1 == sc.mlp_steps)
            curve << step << ',' << format_double(err) << "\n";
    }
    write_text_file(dir + "/training.csv", curve.str());
    write_text_file(dir + "/model.json", save_model_json(p) + "\n");

    ordered_json summary;
    summary["kind"] = "mlp";
    summary["seed"] = sc.seed;
    summary["layers"] = sc.mlp_layers;
    summary["data_count"] = p.data_count;
    summary["steps"] = sc.mlp_steps;
    summary["eta"] = sc.mlp_eta;
    summary["final_error"] = err;
    write_text_file(dir + "/summary.json", summary.dump(2) + "\n");
    write_metadata(dir);
    info(g, "final training error " + format_double(err));
    return 0;
}

int run_aco(const Scenario& sc, const GlobalOptions& g) {
    AcoInstance inst = aco_instance_from_json(read_text_file(resolve(sc, sc.aco_instance_file)));
    ColonyTrace trace = run_colony(inst, sc.aco_iterations, sc.seed);
    std::string dir = out_dir_for(sc, g);
    write_text_file(dir + "/colony.csv", colony_csv(trace));

    ordered_json summary;
    summary["kind"] = "aco";
    summary["seed"] = sc.seed;
    summary["iterations"] = sc.aco_iterations;
    summary["best_length"] = trace.best_length;
    summary["best_path"] = trace.best_path;
    if (!trace.iterations.empty()) {
        summary["final_modal_mass"] = trace.iterations.back().modal_mass;
        summary["final_modal_path"] = trace.iterations.back().modal_path;
        summary["final_support_size"] = trace.iterations.back().support_size;
    }
    write_text_file(dir + "/summary.json", summary.dump(2) + "\n");
    write_metadata(dir);
    info(g, "best path length " + format_double(trace.best_length));
    return 0;
}

int run_market(const Scenario& sc, const GlobalOptions& g) {
    Market market = build_market(sc.market);
    PropagationConfig cfg = sc.prop;
    std::string dir = out_dir_for(sc, g);

    std::ostringstream csv;
    csv << "iteration,niche,price,volume,count\n";
    AggregateResult agg = tatonnement(market, cfg);
    auto emit = [&](int iteration) {
        for (size_t i = 0; i < market.spec.niches.size(); ++i) {
            auto r = read_niche(market, static_cast<int>(i), agg.fixed_point);
            csv << iteration << ',' << market.spec.niches[i].name << ','
                << format_double(r.price) << ',' << format_double(r.volume) << ','
                << format_double(market.producer_count(static_cast<int>(i))) << "\n";
        }
    };
    emit(0);
    for (int step = 1; step <= sc.market_steps; ++step) {
        niche_pattern_step(market, sc.market_L, sc.market_delta, agg.fixed_point);
        agg = tatonnement(market, cfg);
        emit(step);
    }
    write_text_file(dir + "/market.csv", csv.str());

    ordered_json summary;
    summary["kind"] = "market";
    summary["seed"] = sc.seed;
    summary["converged"] = agg.converged;
    summary["iterations"] = agg.iterations_used;
    ordered_json niches = ordered_json::array();
    for (size_t i = 0; i < market.spec.niches.size(); ++i) {
        auto r = read_niche(market, static_cast<int>(i), agg.fixed_point);
        niches.push_back({{"name", market.spec.niches[i].name},
                          {"price", r.price},
                          {"volume", r.volume},
                          {"count", market.producer_count(static_cast<int>(i))}});
    }
    summary["niches"] = niches;
    write_text_file(dir + "/summary.json", summary.dump(2) + "\n");
    write_metadata(dir);
    info(g, "market solved in " + std::to_string(agg.iterations_used) + " iterations");
    return 0;
}

int cmd_run(const std::string& path, const GlobalOptions& g) {
    Scenario sc = load_with_overrides(path, g);
    if (sc.kind == "generic") return run_generic(sc, g);
    if (sc.kind == "mlp") return run_mlp(sc, g);
    if (sc.kind == "aco") return run_aco(sc, g);
    if (sc.kind == "market") return run_market(sc, g);
    throw ConfigError("unknown scenario kind: " + sc.kind);
}

int cmd_detect(const std::string& path, int max_size, const GlobalOptions& g) {
    Scenario sc = load_with_overrides(path, g);
    if (sc.kind != "generic")
        throw ConfigError("detect runs on generic scenarios");
    Network net = build_generic_network(sc);
    AggregateResult agg = solve_aggregate(net, net.zero_state(), sc.prop);

    std::vector<ClosedWalk> walks;
    if (max_size >= 2) walks = enumerate_candidate_walks(net.graph(), max_size);

    ordered_json reports = ordered_json::array();
    int passing = 0;
    for (const auto& walk : walks) {
        FeedbackReport report = check_feedback_loop(net, walk, agg.fixed_point, sc.feedback);
        if (report.is_feedback_loop) {
            report.is_coherent = check_coherence(net, walk, agg.fixed_point, sc.feedback);
            ++passing;
        }
        reports.push_back(ordered_json::parse(feedback_report_to_json(net.graph(), report)));
    }
    std::string dir = out_dir_for(sc, g);
    write_text_file(dir + "/feedback_reports.json", reports.dump(2) + "\n");
    write_metadata(dir);
    info(g, std::to_string(walks.size()) + " candidate walks, " + std::to_string(passing) +
                " feedback loops");
    return 0;
}

int cmd_plotdata(const std::string& run_dir, const std::string& series,
                 const GlobalOptions&) {
    std::cout << plotdata_csv(run_dir, series);
    return 0;
}

int cmd_profile(const std::string& path, int starts, const GlobalOptions& g) {
    Scenario sc = load_with_overrides(path, g);
    if (sc.kind != "generic")
        throw ConfigError("profile runs on generic scenarios");
    Network net = build_generic_network(sc);
    AggregateResult agg = solve_aggregate(net, net.zero_state(), sc.prop);

    std::vector<std::vector<double>> start_states;
    auto rng = make_rng(sc.seed, 0x57A7);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (int i = 0; i < std::max(1, starts); ++i) {
        std::vector<double> x(net.state_size());
        for (double& c : x) c = uni(rng);
        start_states.push_back(std::move(x));
    }
    ConvergenceProfile profile =
        profile_convergence(net, agg.fixed_point, start_states, sc.prop, 30, sc.horizon);

    std::string dir = out_dir_for(sc, g);
    std::ostringstream csv;
    csv << "t,sup_ratio\n";
    for (size_t i = 0; i < profile.times.size(); ++i)
        csv << format_double(profile.times[i]) << ',' << format_double(profile.sup_ratio[i])
            << "\n";
    write_text_file(dir + "/profile.csv", csv.str());

    ordered_json j;
    j["alpha_hat"] = profile.alpha_hat;
    if (profile.cover.count > 0) {
        j["cover_mean"] = profile.cover.mean;
        j["cover_median"] = profile.cover.median;
        j["cover_count"] = profile.cover.count;
    }
    write_text_file(dir + "/profile.json", j.dump(2) + "\n");
    write_metadata(dir);
    info(g, "alpha_hat " + format_double(profile.alpha_hat));
    return 0;
}

int cmd_oracle(const std::string& instance_path, std::string from, std::string to,
               const GlobalOptions& g) {
    AcoInstance inst = aco_instance_from_json(read_text_file(instance_path));
    Vertex a = from.empty() ? inst.colony : inst.graph.vertex(from);
    Vertex b = to.empty() ? inst.food : inst.graph.vertex(to);
    auto path = shortest_path_oracle(inst.graph, inst.lengths, a, b);
    ordered_json j;
    if (path) {
        j["path"] = *path;
        j["length"] = inst.path_length(*path);
    } else {
        j["path"] = nullptr;
    }
    std::cout << j.dump(2) << "\n";
    (void)g;
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    apply_thread_cap();
    CLI::App app{"cognet: signal propagation, pattern dynamics and feedback detection"};
    app.require_subcommand(1);

    GlobalOptions g;
    std::uint64_t seed_value = 0;
    auto* seed_opt = app.add_option("--seed", seed_value, "override the scenario seed");
    app.add_option("--out", g.out_override, "override the output directory");
    app.add_flag("--quiet", g.quiet, "suppress progress output");

    std::string scenario_path, run_dir, series, instance_path, from, to;
    int max_size = 4, starts = 8;

    auto* run = app.add_subcommand("run", "execute a scenario");
    run->add_option("scenario", scenario_path, "scenario TOML file")->required();

    auto* detect = app.add_subcommand("detect", "enumerate walks and test feedback");
    detect->add_option("scenario", scenario_path, "scenario TOML file")->required();
    detect->add_option("--max-size", max_size, "largest walk vertex count");

    auto* plot = app.add_subcommand("plotdata", "emit tidy CSV for one series");
    plot->add_option("run_dir", run_dir, "run output directory")->required();
    plot->add_option("series", series, "series name")->required();

    auto* profile = app.add_subcommand("profile", "convergence profiling");
    profile->add_option("scenario", scenario_path, "scenario TOML file")->required();
    profile->add_option("--starts", starts, "number of random starts");

    auto* oracle = app.add_subcommand("oracle", "exact shortest path for an instance");
    oracle->add_option("instance", instance_path, "ACO instance JSON")->required();
    oracle->add_option("--from", from, "start vertex (default: colony)");
    oracle->add_option("--to", to, "target vertex (default: food)");

    CLI11_PARSE(app, argc, argv);
    if (seed_opt->count() > 0) g.seed = seed_value;

    try {
        if (run->parsed()) return cmd_run(scenario_path, g);
        if (detect->parsed()) return cmd_detect(scenario_path, max_size, g);
        if (plot->parsed()) return cmd_plotdata(run_dir, series, g);
        if (profile->parsed()) return cmd_profile(scenario_path, starts, g);
        if (oracle->parsed()) return cmd_oracle(instance_path, from, to, g);
    } catch (const DivergedError& e) {
        std::cerr << "error: diverged: " << e.what() << "\n";
        return 2;
    } catch (const UnorderedSpaceError& e) {
        std::cerr << "error: unordered-space: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: config: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
