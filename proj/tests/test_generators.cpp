#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>
#include <tuple>

#include "coarse/errors.hpp"
#include "coarse/generators.hpp"
#include "coarse/space.hpp"

using namespace coarse;

namespace {

FiniteSpace make(const char* spec) { return from_graph(gen(GenSpec::parse(spec))); }

// oracle for heisenberg_ball: multiply out all words over {a, b, a^-1, b^-1} of
// length <= R as upper unitriangular integer matrices and count distinct results
std::set<std::tuple<long, long, long>> heis_words(int R) {
    using M = std::tuple<long, long, long>; // (x, y, z): [[1,x,z],[0,1,y],[0,0,1]]
    auto mul = [](M g, M h) {
        auto [x, y, z] = g;
        auto [x2, y2, z2] = h;
        return M{x + x2, y + y2, z + z2 + x * y2};
    };
    std::set<M> cur = {{0, 0, 0}}, all = cur;
    std::vector<M> gens = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}};
    for (int step = 0; step < R; ++step) {
        std::set<M> next;
        for (const M& g : cur)
            for (const M& s : gens) next.insert(mul(g, s));
        cur = std::move(next);
        all.insert(cur.begin(), cur.end());
    }
    return all;
}

} // namespace

TEST_SUITE_BEGIN("generators");

TEST_CASE("basic counts and diameters") {
    Graph t1 = gen(GenSpec::parse("binary_tree:1"));
    CHECK(t1.n == 3);
    CHECK(t1.edges.size() == 2);
    CHECK(from_graph(t1).diameter() == doctest::Approx(2.0));

    FiniteSpace c6 = make("cycle:6");
    CHECK(c6.n() == 6);
    CHECK(c6.diameter() == doctest::Approx(3.0));

    Graph g29 = gen(GenSpec::parse("grid:2,9"));
    CHECK(g29.n == 18);
    CHECK(from_graph(g29).diameter() == doctest::Approx(9.0));
}

TEST_CASE("laakso recursion matches its closed-form counts") {
    for (int level = 0; level <= 3; ++level) {
        Graph g = gen(GenSpec{GenKind::laakso, {level}, 0});
        // V_{l+1} = V_l + 4 E_l, E_{l+1} = 6 E_l from the split-diamond gadget
        long v = 2, e = 1;
        for (int i = 0; i < level; ++i) {
            v += 4 * e;
            e *= 6;
        }
        CHECK(g.n == v);
        CHECK(static_cast<long>(g.edges.size()) == e);
        CHECK(laakso_vertex_count(level) == v);
        CHECK(laakso_edge_count(level) == e);
    }
    // diameter 4^L between the two original endpoints
    CHECK(make("laakso:2").diameter() == doctest::Approx(16.0));
}

TEST_CASE("laakso doubling constant stays bounded across levels") {
    double cap = 0.0;
    for (int level = 1; level <= 3; ++level) {
        FiniteSpace s = make(("laakso:" + std::to_string(level)).c_str());
        std::vector<double> radii;
        for (int r = 1; 2 * r <= static_cast<int>(s.diameter()); ++r) radii.push_back(r);
        cap = std::max(cap, doubling_constant(s, radii));
    }
    CHECK(cap <= 32.0); // one fixed bound for every level
}

TEST_CASE("heisenberg ball matches brute-force word enumeration") {
    Graph g = gen(GenSpec::parse("heisenberg_ball:2"));
    auto words = heis_words(2);
    CHECK(g.n == static_cast<int>(words.size()));
    CHECK(g.n == 17);

    SUBCASE("radius 3 as well") {
        Graph g3 = gen(GenSpec::parse("heisenberg_ball:3"));
        CHECK(g3.n == static_cast<int>(heis_words(3).size()));
    }
}

TEST_CASE("heisenberg ball grows like R^4") {
    std::vector<double> ratios;
    for (int R = 4; R <= 10; ++R) {
        Graph g = gen(GenSpec::parse(("heisenberg_ball:" + std::to_string(R)).c_str()));
        ratios.push_back(static_cast<double>(g.n) / (static_cast<double>(R) * R * R * R));
    }
    double lo = *std::min_element(ratios.begin(), ratios.end());
    double hi = *std::max_element(ratios.begin(), ratios.end());
    CHECK(hi / lo <= 1.5);
}

TEST_CASE("random regular graphs") {
    Graph g = gen(GenSpec::parse("random_regular:24,3,seed=7"));
    std::vector<int> deg(g.n, 0);
    for (const auto& e : g.edges) {
        ++deg[e.u];
        ++deg[e.v];
    }
    for (int d : deg) CHECK(d == 3);

    SUBCASE("bit-for-bit reproducible") {
        Graph h = gen(GenSpec::parse("random_regular:24,3,seed=7"));
        REQUIRE(h.edges.size() == g.edges.size());
        for (std::size_t i = 0; i < g.edges.size(); ++i) {
            CHECK(g.edges[i].u == h.edges[i].u);
            CHECK(g.edges[i].v == h.edges[i].v);
        }
    }
    SUBCASE("different seed, different graph") {
        Graph h = gen(GenSpec::parse("random_regular:24,3,seed=8"));
        bool same = h.edges.size() == g.edges.size();
        if (same)
            for (std::size_t i = 0; i < g.edges.size(); ++i)
                if (g.edges[i].u != h.edges[i].u || g.edges[i].v != h.edges[i].v) same = false;
        CHECK_FALSE(same);
    }
    SUBCASE("parameter validation") {
        CHECK_THROWS_AS(gen(GenSpec::parse("random_regular:7,3,seed=1")), InvalidSpec);
        CHECK_THROWS_AS(gen(GenSpec::parse("random_regular:8,2,seed=1")), InvalidSpec);
    }
}

TEST_CASE("all generated graphs are connected") {
    for (const char* spec : {"path:7", "cycle:9", "grid:3,5", "binary_tree:4", "laakso:2",
                             "random_regular:16,3,seed=3", "heisenberg_ball:3"}) {
        CHECK_NOTHROW(make(spec)); // from_graph throws on disconnected input
    }
}

TEST_CASE("spec parsing round trip") {
    GenSpec s = GenSpec::parse("random_regular:100,3,seed=7");
    CHECK(s.kind == GenKind::random_regular);
    CHECK(s.params == std::vector<long>{100, 3});
    CHECK(s.seed == 7);
    CHECK(s.to_string() == "random_regular:100,3,seed=7");
    CHECK_THROWS_AS(GenSpec::parse("dodecahedron:1"), InvalidSpec);
}

TEST_CASE("automorphisms") {
    CHECK(automorphisms(make("cycle:5")).size() == 10);
    CHECK(automorphisms(make("path:4")).size() == 2);
    CHECK(automorphisms(make("binary_tree:2")).size() == 8);

    SUBCASE("groups: closed under composition, distance preserving") {
        FiniteSpace s = make("cycle:6");
        auto autos = automorphisms(s);
        CHECK(autos.size() == 12);
        for (const auto& g : autos)
            for (int i = 0; i < s.n(); ++i)
                for (int j = 0; j < s.n(); ++j)
                    CHECK(s.dist(g[i], g[j]) == doctest::Approx(s.dist(i, j)));
    }

    SUBCASE("limit enforcement") {
        CHECK_THROWS_AS(automorphisms(make("cycle:70")), TooLarge);
    }
}

TEST_SUITE_END();
