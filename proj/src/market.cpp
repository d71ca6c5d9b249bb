#include "cognet/market.hpp"

#include <algorithm>
#include <cmath>

namespace cognet {

namespace {

constexpr double kCapacityFloor = 1e-6; // congestion denominator floor
constexpr int kV = 0, kP = 1, kD = 2;   // components within one arc

struct NicheWiring {
    int n_in = 0, n_out = 0;
    std::vector<double> recipes; // per in-arc
    double c0 = 0.0, s = 0.0, kappa = 0.0;
};

// inputs:  [ (V,p) per in-arc ..., d per out-arc ... ]
// outputs: [ (V,p) per out-arc ..., d per in-arc ... ]
EvalFn make_niche_eval(const NicheWiring& w) {
    return [w](std::span<const double> prm, std::span<const double> in,
               std::span<double> out) {
        const double count = prm[0];
        const double cap = w.kappa * count;
        double demand_total = 0.0;
        for (int o = 0; o < w.n_out; ++o) demand_total += in[2 * w.n_in + o];
        double v_plan = std::min(demand_total, cap);
        double v_avail = v_plan;
        double volume_proxy = 0.0;
        for (int i = 0; i < w.n_in; ++i) {
            double v_in = in[2 * i + kV];
            if (w.recipes[i] > 0.0)
                v_avail = std::min(v_avail, v_in / w.recipes[i]);
            volume_proxy += (w.recipes[i] > 0.0) ? v_in / w.recipes[i] : 0.0;
        }
        if (w.n_in > 0) volume_proxy /= w.n_in;

        double cost = w.c0 / (1.0 + w.s * std::max(0.0, volume_proxy));
        for (int i = 0; i < w.n_in; ++i)
            cost += w.recipes[i] * in[2 * i + kP];
        double congestion =
            1.0 + std::max(0.0, demand_total - cap) / std::max(cap, kCapacityFloor);
        double price = cost * congestion;

        for (int o = 0; o < w.n_out; ++o) {
            double share = demand_total > 0.0 ? in[2 * w.n_in + o] / demand_total : 0.0;
            out[2 * o + kV] = v_avail * share;
            out[2 * o + kP] = price;
        }
        for (int i = 0; i < w.n_in; ++i)
            out[2 * w.n_out + i] = w.recipes[i] * v_plan;
    };
}

UtilityFn make_niche_utility(const NicheWiring& w) {
    // Profit on the local signals; the scale term runs on input-implied
    // throughput so volume growth upstream lowers this niche's cost.
    return [w](std::span<const double> in, std::span<const double> out) {
        double v_total = 0.0, revenue = 0.0;
        for (int o = 0; o < w.n_out; ++o) {
            v_total += out[2 * o + kV];
            revenue += out[2 * o + kV] * out[2 * o + kP];
        }
        double throughput = 0.0;
        for (int i = 0; i < w.n_in; ++i)
            throughput += (w.recipes[i] > 0.0) ? in[2 * i + kV] / w.recipes[i] : 0.0;
        if (w.n_in > 0) throughput /= w.n_in;
        double cost = w.c0 / (1.0 + w.s * std::max(0.0, throughput));
        double input_cost = 0.0;
        for (int i = 0; i < w.n_in; ++i)
            input_cost += w.recipes[i] * in[2 * i + kP];
        return revenue - (cost + input_cost) * v_total;
    };
}

} // namespace

double Market::producer_count(int niche) const {
    return lifted.agent(niche_vertex.at(niche)).params.at(0);
}

double Market::unit_cost(int niche, double volume) const {
    const auto& n = spec.niches.at(niche);
    return n.c0 / (1.0 + n.s * std::max(0.0, volume));
}

double Market::capacity(int niche) const {
    return spec.niches.at(niche).kappa * producer_count(niche);
}

Market build_market(const MarketSpec& spec) {
    Market market;
    market.spec = spec;

    DirectedGraph g;
    for (const auto& e : spec.entries) {
        Vertex v = g.add_vertex(e.name);
        g.set_environment(v, EnvRole::Entry);
        market.vertex_of[e.name] = v;
    }
    for (const auto& n : spec.niches) {
        Vertex v = g.add_vertex(n.name);
        market.vertex_of[n.name] = v;
        market.niche_vertex.push_back(v);
    }
    for (const auto& x : spec.exits) {
        Vertex v = g.add_vertex(x.name);
        g.set_environment(v, EnvRole::Exit);
        market.vertex_of[x.name] = v;
    }
    std::vector<double> recipe_by_arc;
    for (const auto& a : spec.arcs) {
        g.add_arc(market.vertex_of.at(a.tail), market.vertex_of.at(a.head));
        recipe_by_arc.push_back(a.recipe);
    }

    // (V, p) forward, d backward; prices compare only by equality.
    auto fwd = SignalSpace::reals(2);
    auto bwd = SignalSpace::reals(1);
    auto space = std::make_shared<SignalSpace>(SignalSpace::product(fwd, bwd));
    space->set_order_mode(kP, OrderMode::EqualOnly);
    market.lifted = Network(g, space);

    const int w = 3;
    auto wire = [&](Vertex v, Agent a, bool writes_forward_out, bool writes_demand_in) {
        std::vector<int> reads, writes;
        for (ArcId e : g.in_arcs(v)) {
            reads.push_back(e * w + kV);
            reads.push_back(e * w + kP);
        }
        for (ArcId e : g.out_arcs(v)) reads.push_back(e * w + kD);
        if (writes_forward_out)
            for (ArcId e : g.out_arcs(v)) {
                writes.push_back(e * w + kV);
                writes.push_back(e * w + kP);
            }
        if (writes_demand_in)
            for (ArcId e : g.in_arcs(v)) writes.push_back(e * w + kD);
        market.lifted.set_agent_slots(v, std::move(a), std::move(reads), std::move(writes));
    };

    for (size_t i = 0; i < spec.entries.size(); ++i) {
        Vertex v = market.vertex_of.at(spec.entries[i].name);
        int fan_out = static_cast<int>(g.out_arcs(v).size());
        Agent a;
        a.family = "market_entry";
        a.frozen = true;
        a.params = {spec.entries[i].price};
        a.eval = [fan_out](std::span<const double> prm, std::span<const double> in,
                           std::span<double> out) {
            for (int o = 0; o < fan_out; ++o) {
                out[2 * o + kV] = in[o]; // ship what the buyer demanded
                out[2 * o + kP] = prm[0];
            }
        };
        wire(v, std::move(a), true, false);
    }

    for (size_t i = 0; i < spec.niches.size(); ++i) {
        Vertex v = market.niche_vertex[i];
        NicheWiring nw;
        nw.n_in = static_cast<int>(g.in_arcs(v).size());
        nw.n_out = static_cast<int>(g.out_arcs(v).size());
        for (ArcId e : g.in_arcs(v)) nw.recipes.push_back(recipe_by_arc[e]);
        nw.c0 = spec.niches[i].c0;
        nw.s = spec.niches[i].s;
        nw.kappa = spec.niches[i].kappa;
        Agent a;
        a.family = "market_niche";
        a.params = {spec.niches[i].producer_count};
        a.param_lo = {0.0};
        a.param_hi = {spec.niches[i].count_max};
        a.eval = make_niche_eval(nw);
        a.utility = make_niche_utility(nw);
        wire(v, std::move(a), true, true);
    }

    for (size_t i = 0; i < spec.exits.size(); ++i) {
        Vertex v = market.vertex_of.at(spec.exits[i].name);
        int n_in = static_cast<int>(g.in_arcs(v).size());
        double da = spec.exits[i].demand_a, db = spec.exits[i].demand_b;
        Agent a;
        a.family = "market_exit";
        a.frozen = true;
        a.params = {da, db};
        a.eval = [n_in, da, db](std::span<const double>, std::span<const double> in,
                                std::span<double> out) {
            for (int i2 = 0; i2 < n_in; ++i2)
                out[i2] = std::max(0.0, da - db * in[2 * i2 + kP]);
        };
        wire(v, std::move(a), false, true);
    }

    market.lifted.validate();
    return market;
}

AggregateResult tatonnement(Market& market, const PropagationConfig& config) {
    config.check();
    const Network& net = market.lifted;
    const int n = net.state_size();
    const int w = net.width();

    // start: zero volumes and demands, prices at standalone conversion cost
    std::vector<double> state(n, 0.0);
    for (size_t i = 0; i < market.spec.niches.size(); ++i) {
        Vertex v = market.niche_vertex[i];
        for (ArcId e : net.graph().out_arcs(v))
            state[e * w + kP] = market.spec.niches[i].c0;
    }
    for (const auto& es : market.spec.entries) {
        Vertex v = market.vertex_of.at(es.name);
        for (ArcId e : net.graph().out_arcs(v)) state[e * w + kP] = es.price;
    }

    AggregateResult result;
    std::vector<double> gamma(n, 0.7), last_delta(n, 0.0);
    double prev_change = std::numeric_limits<double>::infinity();
    int growth_run = 0;

    for (int it = 1; it <= config.max_iterations; ++it) {
        std::vector<double> target = step_synchronous(net, state, config.exec);
        double max_rel = 0.0;
        for (int i = 0; i < n; ++i) {
            double delta = target[i] - state[i];
            bool price_slot = (i % w) == kP;
            if (price_slot) {
                // cap the raw congestion response, then damp adaptively
                double cap = std::abs(state[i]) * 9.0 + 1.0;
                if (delta > cap) delta = cap;
                if (delta * last_delta[i] < 0.0) gamma[i] = std::max(1e-12, gamma[i] * 0.5);
                else gamma[i] = std::min(1.0, gamma[i] * 1.05);
                last_delta[i] = delta;
                state[i] += gamma[i] * delta;
            } else {
                state[i] = target[i];
            }
            max_rel = std::max(max_rel, std::abs(delta) / std::max(1.0, std::abs(state[i])));
        }
        result.iterations_used = it;
        result.residual = max_rel;
        if (!std::isfinite(max_rel))
            throw DivergedError("tatonnement state is not finite");
        if (max_rel <= config.tolerance) {
            result.converged = true;
            break;
        }
        growth_run = (max_rel > prev_change) ? growth_run + 1 : 0;
        if (growth_run >= config.divergence_patience)
            throw DivergedError("tatonnement oscillation grew for " +
                                std::to_string(growth_run) + " iterations");
        prev_change = max_rel;
    }
    result.fixed_point = std::move(state);
    return result;
}

NicheReadout read_niche(const Market& market, int niche, std::span<const double> state) {
    const Network& net = market.lifted;
    const int w = net.width();
    Vertex v = market.niche_vertex.at(niche);
    NicheReadout r;
    for (ArcId e : net.graph().out_arcs(v)) {
        r.volume += state[e * w + kV];
        r.price = state[e * w + kP];
        r.demand += state[e * w + kD];
    }
    // arc ids follow the spec's arc order, so recipes index directly
    double input_cost = 0.0;
    for (ArcId e : net.graph().in_arcs(v))
        input_cost += market.spec.arcs.at(e).recipe * state[e * w + kP];
    double count = market.producer_count(niche);
    double cost = market.unit_cost(niche, r.volume) + input_cost;
    double profit = r.volume * (r.price - cost);
    r.profit_per_producer = count > 1e-9
                                ? profit / count
                                : (r.demand > 0.0 ? (r.price - cost) * market.spec.niches[niche].kappa
                                                  : 0.0);
    return r;
}

void niche_pattern_step(Market& market, double lipschitz_L, double delta,
                        std::span<const double> z_state) {
    if (lipschitz_L < 0.0 || delta <= 0.0)
        throw std::invalid_argument("invalid pattern budget");
    const double budget = lipschitz_L * delta;
    for (size_t i = 0; i < market.spec.niches.size(); ++i) {
        auto readout = read_niche(market, static_cast<int>(i), z_state);
        double dir = 0.0;
        if (readout.profit_per_producer > 1e-9) dir = 1.0;
        else if (readout.profit_per_producer < -1e-9) dir = -1.0;
        Agent& a = market.lifted.agent(market.niche_vertex[i]);
        double next = a.params[0] + dir * budget;
        next = std::clamp(next, a.param_lo[0], a.param_hi[0]);
        a.params[0] = next;
    }
}

FeedbackReport detect_scale_feedback(const Market& market,
                                     const std::vector<ArcId>& chain_arcs,
                                     std::span<const double> z_state,
                                     const FeedbackCheckConfig& config) {
    std::vector<Vertex> members;
    for (ArcId e : chain_arcs) {
        for (Vertex v : {market.lifted.graph().arc(e).tail, market.lifted.graph().arc(e).head})
            if (!market.lifted.graph().is_environment(v) &&
                std::find(members.begin(), members.end(), v) == members.end())
                members.push_back(v);
    }
    return check_reinforcement(market.lifted, members, chain_arcs, z_state, config);
}

int market_volume_slot(const Market& market, ArcId e) { return e * market.lifted.width() + kV; }
int market_price_slot(const Market& market, ArcId e) { return e * market.lifted.width() + kP; }
int market_demand_slot(const Market& market, ArcId e) { return e * market.lifted.width() + kD; }

} // namespace cognet
