#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "coarse/errors.hpp"
#include "coarse/generators.hpp"
#include "coarse/space.hpp"
#include "coarse/space_io.hpp"

using namespace coarse;

namespace {

// independent oracle: Floyd-Warshall on the dense edge matrix
std::vector<double> floyd_warshall(const Graph& g) {
    const double inf = 1e100;
    std::vector<double> d(static_cast<std::size_t>(g.n) * g.n, inf);
    for (int i = 0; i < g.n; ++i) d[static_cast<std::size_t>(i) * g.n + i] = 0.0;
    for (const auto& e : g.edges) {
        auto& a = d[static_cast<std::size_t>(e.u) * g.n + e.v];
        auto& b = d[static_cast<std::size_t>(e.v) * g.n + e.u];
        a = std::min(a, e.length);
        b = std::min(b, e.length);
    }
    for (int k = 0; k < g.n; ++k)
        for (int i = 0; i < g.n; ++i)
            for (int j = 0; j < g.n; ++j)
                d[static_cast<std::size_t>(i) * g.n + j] =
                    std::min(d[static_cast<std::size_t>(i) * g.n + j],
                             d[static_cast<std::size_t>(i) * g.n + k] +
                                 d[static_cast<std::size_t>(k) * g.n + j]);
    return d;
}

FiniteSpace make(const char* spec) { return from_graph(gen(GenSpec::parse(spec))); }

// brute-force ball count straight off the adjacency, BFS, no FiniteSpace involved
int bfs_ball_count(const Graph& g, int root, int radius) {
    std::vector<int> dist(g.n, -1);
    std::vector<std::vector<int>> adj(g.n);
    for (const auto& e : g.edges) {
        adj[e.u].push_back(e.v);
        adj[e.v].push_back(e.u);
    }
    std::vector<int> q = {root};
    dist[root] = 0;
    for (std::size_t h = 0; h < q.size(); ++h) {
        int u = q[h];
        if (dist[u] == radius) continue;
        for (int v : adj[u])
            if (dist[v] < 0) {
                dist[v] = dist[u] + 1;
                q.push_back(v);
            }
    }
    int c = 0;
    for (int v = 0; v < g.n; ++v)
        if (dist[v] >= 0) ++c;
    return c;
}

} // namespace

TEST_SUITE_BEGIN("space");

TEST_CASE("from_graph basic examples") {
    FiniteSpace p3 = make("path:3");
    CHECK(p3.dist(0, 2) == doctest::Approx(2.0));

    FiniteSpace single = make("path:1");
    CHECK(single.n() == 1);
    CHECK(single.dist(0, 0) == 0.0);

    FiniteSpace c6 = make("cycle:6");
    CHECK(c6.dist(0, 3) == doctest::Approx(3.0));
    CHECK(c6.dist(0, 4) == doctest::Approx(2.0));
}

TEST_CASE("from_graph rejects disconnected input") {
    Graph g;
    g.n = 4;
    g.edges = {{0, 1, 1.0}, {2, 3, 1.0}};
    CHECK_THROWS_AS(from_graph(g), DisconnectedGraph);
}

TEST_CASE("from_graph matches Floyd-Warshall on random graphs up to n=64") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 8; ++trial) {
        int n = 8 + static_cast<int>(rng() % 57);
        Graph g;
        g.n = n;
        for (int i = 1; i < n; ++i)
            g.edges.push_back({i, static_cast<int>(rng() % i), 1.0 + (rng() % 5)});
        for (int extra = 0; extra < n; ++extra) {
            int u = static_cast<int>(rng() % n), v = static_cast<int>(rng() % n);
            if (u != v) g.edges.push_back({u, v, 1.0 + (rng() % 7)});
        }
        FiniteSpace s = from_graph(g);
        auto fw = floyd_warshall(g);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                CHECK(s.dist(i, j) ==
                      doctest::Approx(fw[static_cast<std::size_t>(i) * n + j]).epsilon(1e-12));
    }
}

TEST_CASE("balls") {
    FiniteSpace p5 = make("path:5");
    CHECK(ball(p5, 2, 1.0) == std::vector<int>{1, 2, 3});
    CHECK(ball(p5, 2, 0.0) == std::vector<int>{2});

    FiniteSpace c6 = make("cycle:6");
    CHECK(ball(c6, 0, 2.0) == std::vector<int>{0, 1, 2, 4, 5});

    SUBCASE("monotone in the radius with nested volumes") {
        FiniteSpace t = make("binary_tree:4");
        for (int x : {0, 7, 30})
            for (int r = 0; r + 1 <= 8; ++r) {
                auto b1 = ball(t, x, r), b2 = ball(t, x, r + 1);
                CHECK(std::includes(b2.begin(), b2.end(), b1.begin(), b1.end()));
                CHECK(volume(t, x, r) <= volume(t, x, r + 1));
            }
    }
}

TEST_CASE("volumes") {
    FiniteSpace p5 = make("path:5");
    CHECK(volume(p5, 2, 1.0) == doctest::Approx(3.0));
    CHECK(volume(p5, 2, 0.0) == doctest::Approx(1.0));

    Graph g = gen(GenSpec::parse("path:5"));
    std::vector<double> mu = {1, 2, 3, 4, 5};
    FiniteSpace weighted = from_graph(g, mu);
    CHECK(volume(weighted, 2, 1.0) == doctest::Approx(2 + 3 + 4));
    CHECK(volume(weighted, 2, 0.0) == doctest::Approx(3.0));
}

TEST_CASE("growth profile") {
    FiniteSpace c8 = make("cycle:8");
    GrowthProfile gp = growth_profile(c8, {2.0});
    CHECK(gp.vmin[0] == doctest::Approx(5.0));
    CHECK(gp.vmax[0] == doctest::Approx(5.0));
    CHECK(gp.uniformity[0] == doctest::Approx(1.0));

    FiniteSpace p5 = make("path:5");
    GrowthProfile gp2 = growth_profile(p5, {1.0});
    CHECK(gp2.vmin[0] == doctest::Approx(2.0));
    CHECK(gp2.vmax[0] == doctest::Approx(3.0));

    SUBCASE("binary tree radius 3 against exhaustive BFS counts") {
        Graph g = gen(GenSpec::parse("binary_tree:6"));
        FiniteSpace t = from_graph(g);
        GrowthProfile gp3 = growth_profile(t, {3.0});
        int vmin = g.n, vmax = 0;
        for (int root = 0; root < g.n; ++root) {
            int c = bfs_ball_count(g, root, 3);
            vmin = std::min(vmin, c);
            vmax = std::max(vmax, c);
        }
        CHECK(gp3.vmin[0] == doctest::Approx(vmin));
        CHECK(gp3.vmax[0] == doctest::Approx(vmax));
        CHECK(gp3.uniformity[0] == doctest::Approx(static_cast<double>(vmax) / vmin));
    }
}

TEST_CASE("doubling constant") {
    FiniteSpace p101 = make("path:101");
    std::vector<double> radii;
    for (int r = 1; r <= 25; ++r) radii.push_back(r);
    CHECK(doubling_constant(p101, radii) <= 2.0);

    FiniteSpace single = make("path:1");
    CHECK(doubling_constant(single, {1.0}) == doctest::Approx(1.0));

    SUBCASE("binary tree doubles like 2^r, by exhaustive counts") {
        Graph g = gen(GenSpec::parse("binary_tree:10"));
        FiniteSpace t = from_graph(g);
        double prev = 0.0;
        for (double r : {1.0, 2.0, 4.0}) {
            double c = doubling_constant(t, {r});
            double brute = 0.0;
            for (int x = 0; x < g.n; ++x)
                brute = std::max(brute, static_cast<double>(bfs_ball_count(g, x, 2 * r)) /
                                            bfs_ball_count(g, x, r));
            CHECK(c == doctest::Approx(brute));
            CHECK(c > prev); // volume is exponential, so the ratio grows with r
            prev = c;
        }
        CHECK(doubling_constant(t, {4.0}) >= 8.0);
    }

    SUBCASE("invariant under uniform measure rescaling") {
        Graph g = gen(GenSpec::parse("binary_tree:5"));
        FiniteSpace a = from_graph(g);
        std::vector<double> mu(g.n, 7.5);
        FiniteSpace b = from_graph(g, mu);
        for (double r : {1.0, 2.0, 4.0})
            CHECK(doubling_constant(a, {r}) == doctest::Approx(doubling_constant(b, {r})));
    }
}

TEST_CASE("b-geodesic metric") {
    FiniteSpace c12 = make("cycle:12");
    FiniteSpace db = b_geodesic_metric(c12, 1.0);
    for (int i = 0; i < 12; ++i)
        for (int j = 0; j < 12; ++j) CHECK(db.dist(i, j) == doctest::Approx(c12.dist(i, j)));

    SUBCASE("two points at distance 5 with b=1 are chain-unreachable") {
        std::vector<double> d = {0, 5, 5, 0};
        FiniteSpace s(2, d);
        CHECK_THROWS_AS(b_geodesic_metric(s, 1.0), ChainUnreachable);
    }

    SUBCASE("P_5 with b=2 stays the path metric, against exhaustive chain search") {
        FiniteSpace p5 = make("path:5");
        FiniteSpace d2 = b_geodesic_metric(p5, 2.0);
        struct Search {
            const FiniteSpace& s;
            double b;
            double best;
            std::vector<char> used;
            void go(int cur, int target, double len) {
                if (len >= best) return;
                if (cur == target) {
                    best = len;
                    return;
                }
                for (int nxt = 0; nxt < s.n(); ++nxt) {
                    if (used[nxt] || nxt == cur || s.dist(cur, nxt) > b + 1e-12) continue;
                    used[nxt] = 1;
                    go(nxt, target, len + s.dist(cur, nxt));
                    used[nxt] = 0;
                }
            }
        };
        for (int i = 0; i < 5; ++i)
            for (int j = 0; j < 5; ++j) {
                if (i == j) continue;
                Search srch{p5, 2.0, 1e100, std::vector<char>(5, 0)};
                srch.used[i] = 1;
                srch.go(i, j, 0.0);
                CHECK(d2.dist(i, j) == doctest::Approx(srch.best));
                CHECK(d2.dist(i, j) >= p5.dist(i, j) - 1e-12); // dominates d
            }
    }

    SUBCASE("output satisfies the space invariants") {
        FiniteSpace t = make("binary_tree:3");
        FiniteSpace db2 = b_geodesic_metric(t, 2.0); // revalidated by the constructor
        CHECK(db2.n() == t.n());
    }
}

TEST_CASE("quasi-geodesic check") {
    FiniteSpace c6 = make("cycle:6");
    CHECK(quasi_geodesic_check(c6, 1.0, 1.0).ok);

    std::vector<double> d = {0, 5, 5, 0};
    FiniteSpace far(2, d);
    auto rep = quasi_geodesic_check(far, 1.0, 10.0);
    CHECK_FALSE(rep.ok);
    CHECK(rep.worst_x == 0);
    CHECK(rep.worst_y == 1);

    FiniteSpace c12 = make("cycle:12");
    CHECK(quasi_geodesic_check(c12, 2.0, 1.0).ok);
}

TEST_CASE("space validation") {
    CHECK_THROWS_AS(FiniteSpace(2, {0, 1, 2, 0}), InvalidSpace);          // asymmetric
    CHECK_THROWS_AS(FiniteSpace(2, {0.1, 1, 1, 0}), InvalidSpace);        // diagonal
    CHECK_THROWS_AS(FiniteSpace(2, {0, 1, 1, 0}, {1, -1}), InvalidSpace); // measure
    CHECK_THROWS_AS(FiniteSpace(3, {0, 1, 9, 1, 0, 1, 9, 1, 0}), InvalidSpace); // triangle
}

TEST_CASE("space file round trip") {
    FiniteSpace t = make("binary_tree:3");
    std::stringstream ss;
    write_space(ss, t);
    SpaceFile back = read_space(ss);
    REQUIRE(back.space.n() == t.n());
    for (int i = 0; i < t.n(); ++i) {
        CHECK(back.space.measure(i) == t.measure(i));
        for (int j = 0; j < t.n(); ++j) CHECK(back.space.dist(i, j) == t.dist(i, j));
    }

    SUBCASE("edges form with measure") {
        Graph g = gen(GenSpec::parse("cycle:5"));
        std::stringstream es;
        write_space(es, g, {1, 2, 3, 4, 5});
        SpaceFile sf = read_space(es);
        REQUIRE(sf.graph.has_value());
        CHECK(sf.space.dist(0, 2) == doctest::Approx(2.0));
        CHECK(sf.space.measure(4) == doctest::Approx(5.0));
    }
}

TEST_SUITE_END();
