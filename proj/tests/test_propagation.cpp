#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cognet/propagation.hpp"
#include "helpers.hpp"

#include <cmath>

using namespace cognet;
using namespace cognet::testing;

namespace {

// closed form for the median cover window of |V| iid Poisson(lambda) streams
double cover_closed_form(double lambda, int n) {
    return -std::log(1.0 - std::pow(2.0, -1.0 / n)) / lambda;
}

} // namespace

TEST_CASE("synchronous step evaluates against the prior vector") {
    SUBCASE("constant agents reach their constants in one step") {
        Network net = constant_ring(4, 2.5);
        auto next = step_synchronous(net, net.zero_state());
        for (double v : next) CHECK(v == 2.5);
        CHECK(propagation_residual(net, next) == 0.0);
    }
    SUBCASE("two-cycle hand example") {
        Network net = two_cycle(0.5, 1.0, 0.5, 0.0);
        auto next = step_synchronous(net, net.zero_state());
        CHECK(next[0] == doctest::Approx(1.0)); // arc (u,v)
        CHECK(next[1] == doctest::Approx(0.0)); // arc (v,u)
    }
    SUBCASE("frozen environment outputs ignore input changes") {
        DirectedGraph g;
        g.add_vertex("w");
        g.add_vertex("v");
        g.add_arc("w", "v");
        g.add_arc("v", "w");
        g.set_environment(0, EnvRole::Entry);
        Network net(std::move(g), reals());
        Agent env;
        env.family = "constant";
        env.frozen = true;
        env.params = {3.0};
        env.eval = make_constant_eval(1);
        net.set_agent(0, std::move(env));
        Agent v;
        v.family = "affine";
        v.params = {0.0, 0.9};
        v.eval = make_affine_eval(1, 1);
        net.set_agent(1, std::move(v));
        net.validate();

        auto a = net.zero_state();
        auto b = net.zero_state();
        b[1] = 42.0; // change the environment agent's input arc (v,w)
        auto na = step_synchronous(net, a);
        auto nb = step_synchronous(net, b);
        CHECK(na[0] == nb[0]);
        CHECK(na[0] == 3.0);
    }
    SUBCASE("serial and OpenMP paths agree bit for bit") {
        Network net = random_contractive(30, 90, 0.9, 7);
        auto x = random_state(net, 3);
        auto serial = step_synchronous(net, x, ExecPolicy::Serial);
        auto parallel = step_synchronous(net, x, ExecPolicy::OpenMP);
        CHECK(serial == parallel);
    }
}

TEST_CASE("solve_aggregate reaches the closed-form two-cycle fixed point") {
    Network net = two_cycle(0.5, 1.0, 0.5, 0.0);
    PropagationConfig cfg;
    cfg.tolerance = 1e-9;
    auto result = solve_aggregate(net, net.zero_state(), cfg);
    CHECK(result.converged);
    // z_uv = 0.5 z_vu + 1, z_vu = 0.5 z_uv  =>  (4/3, 2/3)
    CHECK(result.fixed_point[0] == doctest::Approx(4.0 / 3.0).epsilon(1e-7));
    CHECK(result.fixed_point[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-7));
    CHECK(result.residual <= cfg.tolerance);
}

TEST_CASE("constant networks converge within two iterations") {
    Network net = constant_ring(6, -1.25);
    PropagationConfig cfg;
    auto result = solve_aggregate(net, random_state(net, 11), cfg);
    CHECK(result.converged);
    CHECK(result.iterations_used <= 2);
}

TEST_CASE("expanding agents raise Diverged") {
    Network net = two_cycle(2.0, 0.0, 2.0, 0.0);
    PropagationConfig cfg;
    cfg.max_iterations = 1000;
    auto start = net.zero_state();
    start[0] = 1.0; // distinct start, otherwise zero is the fixed point
    CHECK_THROWS_AS(solve_aggregate(net, start, cfg), DivergedError);
}

TEST_CASE("solver requires at least one arc") {
    DirectedGraph g;
    g.add_vertex("lonely");
    Network net(std::move(g), reals());
    net.agent(0).eval = make_constant_eval(0);
    PropagationConfig cfg;
    CHECK_THROWS_AS(solve_aggregate(net, net.zero_state(), cfg), std::invalid_argument);
}

TEST_CASE("estimate_contraction on linear, constant and expanding agents") {
    PairSampler sampler = [](std::mt19937_64& rng) {
        std::uniform_real_distribution<double> uni(-3.0, 3.0);
        return std::make_pair(std::vector<double>{uni(rng)}, std::vector<double>{uni(rng)});
    };
    SUBCASE("0.5x gives exactly one half") {
        Network net = two_cycle(0.5, 0.0, 0.5, 0.0);
        auto est = estimate_contraction(net, 0, sampler, 200, 5);
        CHECK(est.alpha_hat == doctest::Approx(0.5));
        CHECK(est.contractive);
    }
    SUBCASE("constants give zero") {
        Network net = constant_ring(3);
        auto est = estimate_contraction(net, 0, sampler, 50, 5);
        CHECK(est.alpha_hat == 0.0);
        CHECK(est.contractive);
    }
    SUBCASE("2x is flagged non-contractive") {
        Network net = two_cycle(2.0, 0.0, 0.5, 0.0);
        auto est = estimate_contraction(net, 0, sampler, 200, 5);
        CHECK(est.alpha_hat == doctest::Approx(2.0));
        CHECK_FALSE(est.contractive);
    }
    SUBCASE("identical pairs only is a domain error") {
        Network net = two_cycle(0.5, 0.0, 0.5, 0.0);
        PairSampler degenerate = [](std::mt19937_64&) {
            return std::make_pair(std::vector<double>{1.0}, std::vector<double>{1.0});
        };
        CHECK_THROWS_AS(estimate_contraction(net, 0, degenerate, 10, 5), SignalError);
    }
}

TEST_CASE("asynchronous runs are deterministic and respect the horizon") {
    Network net = random_contractive(8, 20, 0.8, 21);
    PropagationConfig cfg;
    cfg.mode = PropagationMode::Asynchronous;
    cfg.poisson_rate = 1.0;
    cfg.rng_seed = 99;

    SUBCASE("horizon zero yields no events") {
        auto run = run_asynchronous(net, net.zero_state(), cfg, 0.0);
        CHECK(run.events.empty());
        CHECK(run.final_state == net.zero_state());
    }
    SUBCASE("negative horizon is rejected") {
        CHECK_THROWS_AS(run_asynchronous(net, net.zero_state(), cfg, -1.0),
                        std::invalid_argument);
    }
    SUBCASE("same seed gives bit-identical event sequences") {
        auto a = run_asynchronous(net, net.zero_state(), cfg, 50.0);
        auto b = run_asynchronous(net, net.zero_state(), cfg, 50.0);
        REQUIRE(a.events.size() == b.events.size());
        for (size_t i = 0; i < a.events.size(); ++i) {
            CHECK(a.events[i].time == b.events[i].time);
            CHECK(a.events[i].agent == b.events[i].agent);
        }
        cfg.rng_seed = 100;
        auto c = run_asynchronous(net, net.zero_state(), cfg, 50.0);
        bool same = a.events.size() == c.events.size();
        if (same)
            for (size_t i = 0; i < a.events.size(); ++i)
                same = same && a.events[i].agent == c.events[i].agent &&
                       a.events[i].time == c.events[i].time;
        CHECK_FALSE(same);
    }
}

TEST_CASE("cover interval medians match the Poisson closed form") {
    PropagationConfig cfg;
    cfg.mode = PropagationMode::Asynchronous;
    cfg.rng_seed = 12345;

    SUBCASE("one agent at rate one: median is ln 2") {
        // single-agent stream: keep only one agent's events
        Network net = constant_ring(2);
        cfg.poisson_rate = 1.0;
        auto run = run_asynchronous(net, net.zero_state(), cfg, 12000.0);
        std::vector<AsyncEvent> only;
        for (const auto& ev : run.events)
            if (ev.agent == 0) only.push_back({ev.time, 0});
        auto stats = cover_intervals(only, 1, 12000.0);
        REQUIRE(stats.count >= 10000);
        CHECK(stats.median ==
              doctest::Approx(cover_closed_form(1.0, 1)).epsilon(0.05));
        // the mean of an exponential is 1/lambda, distinct from the median
        CHECK(stats.mean == doctest::Approx(1.0).epsilon(0.05));
    }
    SUBCASE("ten agents at rate one: median near 2.70") {
        Network net = constant_ring(10);
        cfg.poisson_rate = 1.0;
        double target = cover_closed_form(1.0, 10);
        CHECK(target == doctest::Approx(2.7036).epsilon(1e-3));
        auto run = run_asynchronous(net, net.zero_state(), cfg, 3.2 * 10000.0);
        auto stats = run.cover;
        REQUIRE(stats.count >= 10000);
        CHECK(stats.median == doctest::Approx(target).epsilon(0.05));
    }
}

TEST_CASE("synchronous and asynchronous dynamics share the fixed point") {
    Network net = random_contractive(10, 26, 0.85, 31);
    PropagationConfig sync_cfg;
    sync_cfg.tolerance = 1e-10;
    auto sync = solve_aggregate(net, net.zero_state(), sync_cfg);

    PropagationConfig async_cfg = sync_cfg;
    async_cfg.mode = PropagationMode::Asynchronous;
    async_cfg.poisson_rate = 1.0;
    async_cfg.rng_seed = 7;
    auto async_result = solve_aggregate(net, random_state(net, 77), async_cfg);

    CHECK(sync.converged);
    CHECK(async_result.converged);
    CHECK(net.state_distance(sync.fixed_point, async_result.fixed_point) < 1e-6);
}

TEST_CASE("per-step contraction is bounded by the worst agent factor") {
    Network net = random_contractive(9, 24, 0.9, 41);
    double alpha_max = 0.0;
    for (const Agent& a : net.agents())
        alpha_max = std::max(alpha_max, a.declared_alpha.value_or(0.0));
    for (int trial = 0; trial < 50; ++trial) {
        auto x = random_state(net, 100 + trial);
        auto y = random_state(net, 200 + trial);
        double before = net.state_distance(x, y);
        double after =
            net.state_distance(step_synchronous(net, x), step_synchronous(net, y));
        CHECK(after <= alpha_max * before + 1e-12);
    }
}

TEST_CASE("fixed point is unique across random starts") {
    Network net = random_contractive(12, 30, 0.9, 51);
    PropagationConfig cfg;
    cfg.tolerance = 1e-9;
    auto reference = solve_aggregate(net, net.zero_state(), cfg);
    for (int trial = 0; trial < 20; ++trial) {
        auto result = solve_aggregate(net, random_state(net, 300 + trial, -5.0, 5.0), cfg);
        CHECK(result.converged);
        CHECK(net.state_distance(result.fixed_point, reference.fixed_point) < 1e-7);
    }
}

TEST_CASE("convergence profile majorizes the decay table") {
    Network net = two_cycle(0.5, 1.0, 0.5, 0.0);
    PropagationConfig cfg;
    auto agg = solve_aggregate(net, net.zero_state(), cfg);

    SUBCASE("starting at the fixed point the profile is zero after t=0") {
        auto profile = profile_convergence(net, agg.fixed_point, {agg.fixed_point}, cfg, 10);
        CHECK(profile.sup_ratio[0] == 1.0);
        for (size_t i = 1; i < profile.sup_ratio.size(); ++i)
            CHECK(profile.sup_ratio[i] == 0.0);
    }
    SUBCASE("all-0.5 agents decay at most 0.5 per synchronous step") {
        std::vector<std::vector<double>> starts;
        for (int i = 0; i < 10; ++i) starts.push_back(random_state(net, 500 + i, -3, 3));
        auto profile = profile_convergence(net, agg.fixed_point, starts, cfg, 20);
        // solver residual perturbs the reference point, hence the tolerance
        for (size_t i = 0; i < profile.times.size(); ++i) {
            CHECK(profile.sup_ratio[i] <=
                  std::pow(0.5, profile.times[i]) * (1.0 + 1e-6) + 1e-9);
            CHECK(profile.sup_ratio[i] <= profile.phi_hat(profile.times[i]) + 1e-9);
        }
        CHECK(profile.alpha_hat <= 0.5 * (1.0 + 1e-3)); // majorant absorbs solver residual
    }
    SUBCASE("asynchronous decay is bounded per cover interval") {
        PropagationConfig acfg;
        acfg.mode = PropagationMode::Asynchronous;
        acfg.poisson_rate = 1.0;
        acfg.rng_seed = 3;
        std::vector<std::vector<double>> starts;
        for (int i = 0; i < 6; ++i) starts.push_back(random_state(net, 700 + i, -3, 3));
        auto profile = profile_convergence(net, agg.fixed_point, starts, acfg, 0, 40.0);
        REQUIRE(profile.cover.count > 0);
        double cover = profile.cover.mean;
        CHECK(profile.alpha_hat < 1.0);
        // the fitted curve majorizes the table
        for (size_t i = 0; i < profile.times.size(); ++i)
            CHECK(profile.sup_ratio[i] <= profile.phi_hat(profile.times[i]) + 1e-9);
        // tail decay per cover interval at least one synchronous sweep,
        // with slack for the randomness of the window count
        double t_last = profile.times.back();
        CHECK(profile.sup_ratio.back() <=
              std::pow(0.5, t_last / cover - 4.0) + 1e-9);
    }
}

TEST_CASE("virtual communities leave external aggregates untouched") {
    // {a,b} form an internal 2-cycle; a's signal to c ignores the community.
    DirectedGraph g;
    for (const char* n : {"a", "b", "c", "d"}) g.add_vertex(n);
    ArcId ab = g.add_arc("a", "b");
    ArcId ba = g.add_arc("b", "a");
    ArcId ac = g.add_arc("a", "c");
    ArcId cd = g.add_arc("c", "d");
    Network net(std::move(g), reals());

    Agent a;
    a.family = "custom";
    a.eval = [](std::span<const double>, std::span<const double> in, std::span<double> out) {
        out[0] = 0.5 * in[0]; // to b: depends on the community
        out[1] = 0.7;         // to c: constant in the community's signals
    };
    net.set_agent(0, std::move(a));
    Agent b;
    b.family = "affine";
    b.params = {0.2, 0.5};
    b.eval = make_affine_eval(1, 1);
    net.set_agent(1, std::move(b));
    Agent c;
    c.family = "affine";
    c.params = {0.0, 0.5};
    c.eval = make_affine_eval(1, 1);
    net.set_agent(2, std::move(c));
    Agent d;
    d.family = "constant";
    d.params = {};
    d.eval = make_constant_eval(0);
    net.set_agent(3, std::move(d));
    net.validate();

    PropagationConfig cfg;
    auto base = net.zero_state();
    auto perturbed = base;
    perturbed[ab] = 5.0;
    perturbed[ba] = -3.0;
    auto z1 = solve_aggregate(net, base, cfg);
    auto z2 = solve_aggregate(net, perturbed, cfg);
    CHECK(z1.fixed_point[ac] == doctest::Approx(z2.fixed_point[ac]).epsilon(1e-9));
    CHECK(z1.fixed_point[cd] == doctest::Approx(z2.fixed_point[cd]).epsilon(1e-9));
}
