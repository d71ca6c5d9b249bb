#pragma once
// Toy market economy: niche agents transform goods under prices and
// preferences. Arc signals are (volume, price) forward and demanded volume
// backward; price tatonnement is the propagation layer, producer entry/exit
// the pattern layer. Economies of scale enter through the niche cost curve
// c0 / (1 + s * volume).

#include "cognet/feedback.hpp"
#include "cognet/twoway.hpp"

#include <map>
#include <string>
#include <vector>

namespace cognet {

struct NicheSpec {
    std::string name;
    double c0 = 1.0;         // unit conversion cost at zero volume
    double s = 0.0;          // scale coefficient
    double kappa = 1.0;      // capacity per producer
    double producer_count = 1.0;
    double count_max = std::numeric_limits<double>::infinity();
};

struct EntrySpec {
    std::string name;
    double price = 0.0; // posted resource price
};

struct ExitSpec {
    std::string name;
    double demand_a = 1.0; // D(p) = max(0, a - b p)
    double demand_b = 1.0;
};

struct MarketSpec {
    std::vector<EntrySpec> entries;
    std::vector<NicheSpec> niches;
    std::vector<ExitSpec> exits;
    // arcs by vertex name; recipe = input units per output unit (niche heads)
    struct ArcSpec {
        std::string tail, head;
        double recipe = 1.0;
    };
    std::vector<ArcSpec> arcs;
};

// Per-arc signal layout in the lifted network: components (V, p, d).
// V and d are order-ascending; p participates in the order only by equality.
struct Market {
    MarketSpec spec;
    Network lifted;                 // one agent per entry/niche/exit
    std::vector<int> niche_vertex;  // niche index -> vertex
    std::map<std::string, Vertex> vertex_of;

    double producer_count(int niche) const;
    double unit_cost(int niche, double volume) const;
    double capacity(int niche) const;
};

Market build_market(const MarketSpec& spec);

// Damped Jacobi iteration of the market update map until the largest
// relative change falls under config.tolerance. Price slots carry adaptive
// damping; the congestion factor realizes the negative price feedback.
AggregateResult tatonnement(Market& market, const PropagationConfig& config);

// Volume shipped, posted price and per-producer profit of one niche at a
// solved state.
struct NicheReadout {
    double volume = 0.0;
    double price = 0.0;
    double profit_per_producer = 0.0;
    double demand = 0.0;
};
NicheReadout read_niche(const Market& market, int niche, std::span<const double> state);

// Producer entry/exit: each count moves by at most L*delta toward the sign
// of per-producer profit, floored at zero and capped by count_max.
void niche_pattern_step(Market& market, double lipschitz_L, double delta,
                        std::span<const double> z_state);

// Scale-economy feedback along an entry-to-exit chain (the backward walk is
// implicit in the product signals). Delegates to the reinforcement check
// with the niche profit utilities.
FeedbackReport detect_scale_feedback(const Market& market,
                                     const std::vector<ArcId>& chain_arcs,
                                     std::span<const double> z_state,
                                     const FeedbackCheckConfig& config);

// Signal slots of one arc.
int market_volume_slot(const Market& market, ArcId e);
int market_price_slot(const Market& market, ArcId e);
int market_demand_slot(const Market& market, ArcId e);

} // namespace cognet
