#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cognet/graph.hpp"
#include "cognet/json_io.hpp"
#include "cognet/rng.hpp"
#include "cognet/signal.hpp"

#include <algorithm>
#include <random>
#include <set>

using namespace cognet;

namespace {

SpacePtr reals1() { return std::make_shared<SignalSpace>(SignalSpace::reals(1)); }

SignalVector scalar_vec(SpacePtr space, std::vector<std::pair<ArcId, double>> values) {
    std::vector<ArcId> arcs;
    for (auto& [e, v] : values) arcs.push_back(e);
    SignalVector out(space, arcs);
    for (auto& [e, v] : values) out.set(e, v);
    return out;
}

} // namespace

TEST_CASE("incidence matches the worked example graph") {
    // a->b, d->b, b->c, b->d plus padding arcs elsewhere
    DirectedGraph g;
    for (const char* n : {"a", "b", "c", "d"}) g.add_vertex(n);
    ArcId ab = g.add_arc("a", "b");
    ArcId db = g.add_arc("d", "b");
    ArcId bc = g.add_arc("b", "c");
    ArcId bd = g.add_arc("b", "d");

    auto [tb, fb] = g.incidence(g.vertex("b"));
    std::set<ArcId> t(tb.begin(), tb.end()), f(fb.begin(), fb.end());
    CHECK(t == std::set<ArcId>{ab, db});
    CHECK(f == std::set<ArcId>{bc, bd});
}

TEST_CASE("incidence of an isolated vertex is empty") {
    DirectedGraph g;
    g.add_vertex("solo");
    auto [t, f] = g.incidence(0);
    CHECK(t.empty());
    CHECK(f.empty());
}

TEST_CASE("incidence on a 2-cycle is forced by direction") {
    DirectedGraph g;
    g.add_vertex("u");
    g.add_vertex("v");
    ArcId uv = g.add_arc("u", "v");
    ArcId vu = g.add_arc("v", "u");
    auto [tu, fu] = g.incidence(g.vertex("u"));
    REQUIRE(tu.size() == 1);
    REQUIRE(fu.size() == 1);
    CHECK(tu[0] == vu);
    CHECK(fu[0] == uv);
}

TEST_CASE("graph rejects self-loops and unknown vertices") {
    DirectedGraph g;
    g.add_vertex("u");
    CHECK_THROWS_AS(g.add_arc(0, 0), GraphError);
    CHECK_THROWS_AS(g.incidence(5), GraphError);
    CHECK_THROWS_AS(g.vertex("nope"), GraphError);
}

TEST_CASE("incidence is stable under arc reordering") {
    // same arcs inserted in two orders; the identity sets must agree
    auto build = [](bool flip) {
        DirectedGraph g;
        for (const char* n : {"u", "v", "w"}) g.add_vertex(n);
        std::vector<std::pair<std::string, std::string>> arcs = {
            {"u", "v"}, {"v", "w"}, {"w", "u"}, {"u", "w"}};
        if (flip) std::reverse(arcs.begin(), arcs.end());
        for (auto& [a, b] : arcs) g.add_arc(a, b);
        return g;
    };
    DirectedGraph g1 = build(false), g2 = build(true);
    for (const char* n : {"u", "v", "w"}) {
        auto ends = [&](const DirectedGraph& g, bool out) {
            std::multiset<std::string> names;
            auto [t, f] = g.incidence(g.vertex(n));
            for (ArcId e : (out ? f : t))
                names.insert(g.name(out ? g.arc(e).head : g.arc(e).tail));
            return names;
        };
        CHECK(ends(g1, true) == ends(g2, true));
        CHECK(ends(g1, false) == ends(g2, false));
    }
}

TEST_CASE("rho_set basics") {
    auto space = reals1();
    SUBCASE("identical vectors have distance zero") {
        auto x = scalar_vec(space, {{0, 1.5}, {1, -2.0}});
        CHECK(rho_set(x, x) == 0.0);
    }
    SUBCASE("single real arc uses absolute difference") {
        auto x = scalar_vec(space, {{0, 3.0}});
        auto y = scalar_vec(space, {{0, 5.0}});
        CHECK(rho_set(x, y) == doctest::Approx(2.0));
    }
    SUBCASE("index mismatch is a domain error") {
        auto x = scalar_vec(space, {{0, 1.0}});
        auto y = scalar_vec(space, {{1, 1.0}});
        CHECK_THROWS_AS(rho_set(x, y), SignalError);
    }
}

TEST_CASE("set signals use the counting measure of the symmetric difference") {
    auto space = std::make_shared<SignalSpace>(
        SignalSpace::finite_set({"a", "b", "c"}));
    SignalVector x(space, {0}), y(space, {0});
    x.set(0, std::vector<double>{1, 1, 0}); // {a,b}
    y.set(0, std::vector<double>{0, 1, 1}); // {b,c}
    CHECK(rho_set(x, y) == doctest::Approx(2.0));
    CHECK(space->measure(x.at(0)).value() == doctest::Approx(2.0));

    // rho(x,y) = mu(x symmetric-difference y) exactly, and zero iff equal
    auto rng = make_rng(11, 0);
    std::uniform_int_distribution<int> bit(0, 1);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> a(3), b(3);
        int sym_diff = 0;
        for (int i = 0; i < 3; ++i) {
            a[i] = bit(rng);
            b[i] = bit(rng);
            sym_diff += a[i] != b[i];
        }
        x.set(0, a);
        y.set(0, b);
        CHECK(rho_set(x, y) == doctest::Approx(sym_diff));
        CHECK((rho_set(x, y) == 0.0) == (a == b));
    }
}

TEST_CASE("metric axioms hold on sampled triples in every realization") {
    auto spaces = std::vector<SpacePtr>{
        std::make_shared<SignalSpace>(SignalSpace::reals(3)),
        std::make_shared<SignalSpace>(SignalSpace::finite_set({"p", "q", "r", "s"})),
        std::make_shared<SignalSpace>(SignalSpace::distribution({"h", "t"}))};
    auto rng = make_rng(5, 0);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (const auto& space : spaces) {
        for (int trial = 0; trial < 300; ++trial) {
            std::vector<std::vector<double>> pts(3, std::vector<double>(space->width()));
            for (auto& p : pts)
                for (double& c : p) c = uni(rng);
            double xy = space->distance(pts[0], pts[1]);
            double yx = space->distance(pts[1], pts[0]);
            double yz = space->distance(pts[1], pts[2]);
            double xz = space->distance(pts[0], pts[2]);
            CHECK(space->distance(pts[0], pts[0]) == 0.0);
            CHECK(xy == doctest::Approx(yx));
            CHECK(xz <= xy + yz + 1e-12);
            CHECK(xy >= 0.0);
        }
    }
}

TEST_CASE("order is irreflexive and transitive on sampled chains") {
    auto space = SignalSpace::reals(2);
    auto rng = make_rng(17, 0);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> a{uni(rng), uni(rng)};
        std::vector<double> b{a[0] + uni(rng), a[1] + uni(rng)};
        std::vector<double> c{b[0] + uni(rng), b[1] + uni(rng)};
        CHECK_FALSE(space.less(a, a));
        if (space.less(a, b) && space.less(b, c)) CHECK(space.less(a, c));
    }
    std::vector<double> p{0.5, 0.5}, q{0.4, 0.6};
    CHECK_THROWS_AS(SignalSpace::distribution({"x", "y"}).less(p, q), SignalError);
}

TEST_CASE("concat behaves as the disjoint-union identity") {
    auto space = reals1();
    auto xb = scalar_vec(space, {{2, 7.0}});
    SUBCASE("empty identity") {
        auto empty = SignalVector::empty(space);
        auto joined = concat(empty, xb);
        CHECK(joined == xb);
    }
    SUBCASE("two disjoint arcs") {
        auto xa = scalar_vec(space, {{1, 4.0}});
        auto joined = concat(xa, xb);
        CHECK(joined.size() == 2);
        CHECK(joined.at(1)[0] == 4.0);
        CHECK(joined.at(2)[0] == 7.0);
    }
    SUBCASE("round trip through subvector") {
        auto xa = scalar_vec(space, {{1, 4.0}, {3, -1.0}});
        auto joined = concat(xa, xb);
        CHECK(joined.subvector({1, 3}) == xa);
    }
    SUBCASE("overlap is rejected") {
        auto xa = scalar_vec(space, {{2, 1.0}});
        CHECK_THROWS_AS(concat(xa, xb), SignalError);
    }
}

TEST_CASE("splice overwrites the intersection only") {
    auto space = reals1();
    auto x = scalar_vec(space, {{1, 1.0}, {2, 1.0}});
    SUBCASE("empty splice is the identity") {
        CHECK(splice(x, SignalVector::empty(space)) == x);
    }
    SUBCASE("full splice replaces everything") {
        auto xp = scalar_vec(space, {{1, 9.0}, {2, 8.0}});
        CHECK(splice(x, xp) == xp);
    }
    SUBCASE("partial overlap") {
        auto xp = scalar_vec(space, {{2, 9.0}, {3, 9.0}});
        auto out = splice(x, xp);
        CHECK(out.arcs() == std::vector<ArcId>{1, 2});
        CHECK(out.at(1)[0] == 1.0);
        CHECK(out.at(2)[0] == 9.0);
    }
    SUBCASE("random splice properties") {
        auto rng = make_rng(23, 0);
        std::uniform_real_distribution<double> uni(-5.0, 5.0);
        for (int trial = 0; trial < 100; ++trial) {
            auto a = scalar_vec(space, {{0, uni(rng)}, {1, uni(rng)}, {2, uni(rng)}});
            auto b = scalar_vec(space, {{0, uni(rng)}, {1, uni(rng)}, {2, uni(rng)}});
            CHECK(splice(a, b) == b);
            CHECK(splice(a, SignalVector::empty(space)) == a);
        }
    }
}

TEST_CASE("rho_set inherits metric axioms over random vectors") {
    auto space = std::make_shared<SignalSpace>(SignalSpace::reals(2));
    auto rng = make_rng(31, 0);
    std::uniform_real_distribution<double> uni(-2.0, 2.0);
    std::vector<ArcId> arcs{0, 1, 2, 3};
    auto draw = [&] {
        SignalVector v(space, arcs);
        for (double& c : v.flat()) c = uni(rng);
        return v;
    };
    for (int trial = 0; trial < 200; ++trial) {
        auto x = draw(), y = draw(), z = draw();
        CHECK(rho_set(x, x) == 0.0);
        CHECK(rho_set(x, y) == doctest::Approx(rho_set(y, x)));
        CHECK(rho_set(x, z) <= rho_set(x, y) + rho_set(y, z) + 1e-12);
    }
}

TEST_CASE("graph JSON round trip preserves identity and environment") {
    DirectedGraph g;
    for (const char* n : {"in", "mid", "out"}) g.add_vertex(n);
    g.add_arc("in", "mid");
    g.add_arc("mid", "out");
    g.set_environment(g.vertex("in"), EnvRole::Entry);
    g.set_environment(g.vertex("out"), EnvRole::Exit);

    DirectedGraph back = graph_from_json(graph_to_json(g));
    CHECK(back.vertex_count() == 3);
    CHECK(back.arc_count() == 2);
    CHECK(back.env_role(back.vertex("in")) == EnvRole::Entry);
    CHECK(back.env_role(back.vertex("out")) == EnvRole::Exit);
    CHECK(back.arc(0).tail == back.vertex("in"));
    CHECK(back.arc(1).head == back.vertex("out"));
}
