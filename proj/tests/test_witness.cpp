#include <doctest.h>

#include <cmath>
#include <memory>

#include "coarse/errors.hpp"
#include "coarse/generators.hpp"
#include "coarse/space.hpp"
#include "coarse/witness.hpp"

using namespace coarse;

namespace {

std::shared_ptr<const FiniteSpace> make(const char* spec) {
    return std::make_shared<FiniteSpace>(from_graph(gen(GenSpec::parse(spec))));
}

// second implementation of the L^p norm, straight summation
double lp_norm_direct(const SparseVec& v, double p, const FiniteSpace& s) {
    double acc = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i)
        acc += std::pow(std::fabs(v.val[i]), p) * s.measure(v.idx[i]);
    return std::pow(acc, 1.0 / p);
}

double lp_diff_direct(const SparseVec& a, const SparseVec& b, double p,
                      const FiniteSpace& s) {
    double acc = 0.0;
    for (int y = 0; y < s.n(); ++y) {
        double d = a.value_at(y) - b.value_at(y);
        acc += std::pow(std::fabs(d), p) * s.measure(y);
    }
    return std::pow(acc, 1.0 / p);
}

} // namespace

TEST_SUITE_BEGIN("witness");

TEST_CASE("subexp family evaluates the defining sum") {
    auto p9 = make("path:9");
    WitnessFamily f = subexp_family(p9, {1, 2});

    SUBCASE("interior point of P_9 at n=2: direct evaluation gives 4/15") {
        for (int x = 2; x <= 6; ++x) {
            double expected = 0.5 * (1.0 / volume(*p9, x, 1) + 1.0 / volume(*p9, x, 2));
            CHECK(expected == doctest::Approx(4.0 / 15.0));
            CHECK(f.at(2, x).value_at(x) == doctest::Approx(4.0 / 15.0).epsilon(1e-12));
        }
    }

    SUBCASE("n=1 gives the single normalized indicator") {
        for (int x = 0; x < 9; ++x) {
            auto b = ball(*p9, x, 1.0);
            for (int y : b)
                CHECK(f.at(1, x).value_at(y) == doctest::Approx(1.0 / volume(*p9, x, 1)));
            CHECK(f.at(1, x).size() == b.size());
        }
    }
}

TEST_CASE("subexp family members are probability densities on C_12") {
    auto c12 = make("cycle:12");
    WitnessFamily f = subexp_family(c12, {1, 2, 3, 4});
    for (int si = 0; si < 4; ++si)
        for (int x = 0; x < 12; ++x) {
            double mass = 0.0;
            const SparseVec& v = f.psi[si][x];
            for (std::size_t e = 0; e < v.size(); ++e)
                mass += v.val[e] * c12->measure(v.idx[e]);
            CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
        }
}

TEST_CASE("uniform volume family") {
    SUBCASE("complete graph K_5 has a constant profile: DegenerateProfile") {
        Graph k5;
        k5.n = 5;
        for (int i = 0; i < 5; ++i)
            for (int j = i + 1; j < 5; ++j) k5.edges.push_back({i, j, 1.0});
        auto s = std::make_shared<FiniteSpace>(from_graph(k5));
        CHECK_THROWS_AS(uniform_volume_family(s, 1.0, {1}), DegenerateProfile);
    }

    SUBCASE("P_64 at n=16: profile beats the paper-shape lower bound") {
        auto p64 = make("path:64");
        for (double p : {1.0, 2.0}) {
            WitnessFamily f = uniform_volume_family(p64, p, {16});
            AProfile prof = measure_profile(f);
            // v = vmin: v(r) = r+1 on a path (endpoint balls); the construction
            // guarantees ||psi_{n,x}||_p >= j(n) (1/2)^{1/p}; recompute j(n) here
            std::vector<double> v(17);
            for (int r = 1; r <= 16; ++r) v[r] = r + 1;
            auto kf = [&](int m) {
                int best = 0;
                for (int k = 0; k < m; ++k)
                    if (v[m - k] >= v[m] / 2.0) best = k;
                return best;
            };
            int jn = 0;
            for (int j = 1; j <= 16; ++j) jn = std::max(jn, kf(j));
            double guarantee = jn * std::pow(0.5, 1.0 / p);
            CHECK(prof.J_at(16) >= guarantee - 1e-9);
            CHECK(prof.J_at(16) >=
                  std::pow(0.5, 1.0 / p) * 16.0 / std::log2(v[16]) - 1e-9);
        }
    }

    SUBCASE("supports live in B(x, q_n - 1)") {
        auto c32 = make("cycle:32");
        WitnessFamily f = uniform_volume_family(c32, 2.0, {4, 8});
        CHECK_NOTHROW(measure_profile(f)); // support check runs inside
        for (std::size_t si = 0; si < f.scales.size(); ++si)
            for (int x = 0; x < 32; ++x) {
                const SparseVec& v = f.psi[si][x];
                for (std::size_t e = 0; e < v.size(); ++e)
                    CHECK(c32->dist(x, v.idx[e]) <= f.scales[si]);
            }
    }
}

TEST_CASE("doubling family") {
    SUBCASE("proof estimate J_raw(n) >= n/(2 C^{1/p}) holds on C_64") {
        auto c64 = make("cycle:64");
        std::vector<double> radii;
        for (int r = 1; r <= 16; ++r) radii.push_back(r);
        double C = doubling_constant(*c64, radii);
        for (double p : {1.0, 2.0, 3.0}) {
            WitnessFamily f = doubling_family(c64, p, {4, 8, 16});
            AProfile prof = measure_profile(f);
            for (int n : {4, 8, 16})
                CHECK(prof.J_at(n) >= n / (2.0 * std::pow(C, 1.0 / p)) - 1e-9);
        }
    }

    SUBCASE("n=1 reduces to a single scaled indicator") {
        auto c8 = make("cycle:8");
        WitnessFamily f = doubling_family(c8, 2.0, {1});
        double v1 = volume(*c8, 0, 1.0);
        for (int y : ball(*c8, 0, 1.0))
            CHECK(f.at(1, 0).value_at(y) == doctest::Approx(std::pow(v1, -0.5)));
    }

    SUBCASE("Laakso level 3, n=8, p=2: J(8)/8 within the doubling window") {
        auto lk = make("laakso:3");
        std::vector<double> radii;
        for (int r = 1; r <= 32; ++r) radii.push_back(r);
        double C = doubling_constant(*lk, radii);
        WitnessFamily f = doubling_family(lk, 2.0, {8});
        AProfile prof = measure_profile(f);
        double ratio = prof.J_at(8) / 8.0;
        CHECK(ratio >= 1.0 / (2.0 * std::sqrt(C)) - 1e-9);
        CHECK(ratio <= 1.0 + 1e-9);
    }

    SUBCASE("non-doubling input draws a warning, not an error") {
        auto t8 = make("binary_tree:8");
        WitnessFamily f = doubling_family(t8, 2.0, {8});
        CHECK(!f.warnings.empty());
    }
}

TEST_CASE("normalize") {
    auto c16 = make("cycle:16");
    WitnessFamily f = doubling_family(c16, 2.0, {2, 4});
    NormalizeResult norm = normalize(f);

    SUBCASE("post-normalization pair ratios max out at exactly 1") {
        for (std::size_t si = 0; si < norm.family.scales.size(); ++si) {
            double best = 0.0;
            for (int x = 0; x < 16; ++x)
                for (int y = x + 1; y < 16; ++y)
                    best = std::max(best, lp_diff_direct(norm.family.psi[si][x],
                                                         norm.family.psi[si][y], 2.0,
                                                         *c16) /
                                              c16->dist(x, y));
            CHECK(best == doctest::Approx(1.0).epsilon(1e-9));
        }
    }

    SUBCASE("idempotent on an already tight family") {
        NormalizeResult again = normalize(norm.family);
        for (std::size_t si = 0; si < 2; ++si)
            for (int x = 0; x < 16; ++x)
                for (std::size_t e = 0; e < norm.family.psi[si][x].size(); ++e)
                    CHECK(again.family.psi[si][x].val[e] ==
                          doctest::Approx(norm.family.psi[si][x].val[e]).epsilon(1e-12));
    }

    SUBCASE("homogeneity: scaling by 3 comes back out") {
        WitnessFamily scaled = f;
        for (auto& layer : scaled.psi)
            for (auto& v : layer) v.scale(3.0);
        NormalizeResult n2 = normalize(scaled);
        for (std::size_t si = 0; si < 2; ++si)
            for (int x = 0; x < 16; ++x)
                for (std::size_t e = 0; e < norm.family.psi[si][x].size(); ++e)
                    CHECK(n2.family.psi[si][x].val[e] ==
                          doctest::Approx(norm.family.psi[si][x].val[e]).epsilon(1e-12));
        AProfile p1 = measure_profile(f), p2 = measure_profile(scaled);
        for (int n : {2, 4}) CHECK(p2.J_at(n) == doctest::Approx(3.0 * p1.J_at(n)));
    }

    SUBCASE("doubling family on C_64: post-normalization J(n) stays linear") {
        auto c64 = make("cycle:64");
        NormalizeResult big = normalize(doubling_family(c64, 2.0, {4, 8, 16}));
        double lo = 1e100, hi = 0.0;
        for (int n : {4, 8, 16}) {
            double r = big.profile.J_at(n) / n;
            lo = std::min(lo, r);
            hi = std::max(hi, r);
        }
        CHECK(lo > 0.0);
        CHECK(hi / lo <= 4.0);
    }
}

TEST_CASE("measure_profile") {
    auto c32 = make("cycle:32");
    SUBCASE("zero functions give J = 0") {
        WitnessFamily z;
        z.p = 2.0;
        z.scales = {2};
        z.space = c32;
        z.psi = {std::vector<SparseVec>(32)};
        AProfile prof = measure_profile(z);
        CHECK(prof.J_at(2) == 0.0);
    }

    SUBCASE("single point space") {
        auto one = make("path:1");
        WitnessFamily f = subexp_family(one, {3});
        AProfile prof = measure_profile(f);
        CHECK(prof.J_at(3) == doctest::Approx(lp_norm_direct(f.at(3, 0), 1.0, *one)));
    }

    SUBCASE("subexp norms on C_32 match an independent norm implementation") {
        WitnessFamily f = subexp_family(c32, {2, 4, 8});
        AProfile prof = measure_profile(f);
        for (int n : {2, 4, 8}) {
            double jmin = 1e100;
            for (int x = 0; x < 32; ++x)
                jmin = std::min(jmin, lp_norm_direct(f.at(n, x), 1.0, *c32));
            CHECK(prof.J_at(n) == doctest::Approx(jmin).epsilon(1e-12));
        }
    }

    SUBCASE("support violations are caught") {
        WitnessFamily bad;
        bad.p = 1.0;
        bad.scales = {1};
        bad.space = c32;
        bad.psi.resize(1);
        bad.psi[0].resize(32);
        bad.psi[0][0].push(16, 1.0); // d(0,16) = 16 > 1
        CHECK_THROWS_AS(measure_profile(bad), SupportViolation);
    }

    SUBCASE("saturation flags past half the diameter") {
        WitnessFamily f = subexp_family(c32, {8, 16});
        AProfile prof = measure_profile(f);
        CHECK_FALSE(prof.samples[0].saturated); // diam 16, 8 <= 8
        CHECK(prof.samples[1].saturated);       // 16 > 8
    }
}

TEST_CASE("p_convert") {
    auto p32 = make("path:32");
    WitnessFamily f1 = subexp_family(p32, {2, 4, 8});

    SUBCASE("q = p is the identity") {
        WitnessFamily same = p_convert(f1, 1.0);
        CHECK(same.p == 1.0);
        for (int x = 0; x < 32; ++x)
            for (std::size_t e = 0; e < f1.psi[0][x].size(); ++e)
                CHECK(same.psi[0][x].val[e] == f1.psi[0][x].val[e]);
    }

    SUBCASE("probability densities land on the unit sphere of L^2") {
        WitnessFamily f2 = p_convert(f1, 2.0);
        for (int x = 0; x < 32; ++x)
            CHECK(lp_norm_direct(f2.at(4, x), 2.0, *p32) == doctest::Approx(1.0));
    }

    SUBCASE("J'(n) = J(n)^{1/2} through the conversion") {
        AProfile before = measure_profile(f1);
        WitnessFamily f2 = p_convert(f1, 2.0);
        AProfile after = measure_profile(f2);
        for (int n : {2, 4, 8})
            CHECK(after.J_at(n) ==
                  doctest::Approx(std::sqrt(before.J_at(n))).epsilon(1e-9));
    }

    SUBCASE("supports are preserved exactly") {
        WitnessFamily f2 = p_convert(f1, 3.0);
        for (std::size_t si = 0; si < f1.scales.size(); ++si)
            for (int x = 0; x < 32; ++x) {
                REQUIRE(f2.psi[si][x].size() == f1.psi[si][x].size());
                for (std::size_t e = 0; e < f1.psi[si][x].size(); ++e)
                    CHECK(f2.psi[si][x].idx[e] == f1.psi[si][x].idx[e]);
            }
    }

    SUBCASE("q below p is rejected") {
        WitnessFamily f2 = p_convert(f1, 2.0);
        CHECK_THROWS_AS(p_convert(f2, 1.5), BadExponent);
    }
}

TEST_CASE("equivariance of the constructions") {
    // witness functions depend only on balls and volumes, so automorphic images
    // have identical difference norms
    for (const char* spec : {"cycle:12", "binary_tree:3"}) {
        auto s = make(spec);
        auto autos = automorphisms(*s);
        WitnessFamily f = doubling_family(s, 2.0, {2, 4});
        for (const auto& g : autos)
            for (int si = 0; si < 2; ++si)
                for (int x = 0; x < s->n(); x += 3)
                    for (int y = x + 1; y < s->n(); y += 2) {
                        double a = lp_diff_direct(f.psi[si][x], f.psi[si][y], 2.0, *s);
                        double b =
                            lp_diff_direct(f.psi[si][g[x]], f.psi[si][g[y]], 2.0, *s);
                        CHECK(a == doctest::Approx(b).epsilon(1e-13));
                    }
    }
}

TEST_CASE("net transfer") {
    auto c32 = make("cycle:32");
    SUBCASE("identity retraction keeps the family") {
        WitnessFamily f = subexp_family(c32, {2, 4});
        std::vector<int> incl(32), retr(32);
        for (int i = 0; i < 32; ++i) incl[i] = retr[i] = i;
        WitnessFamily g = net_transfer(f, c32, incl, retr, 0.0);
        CHECK(g.scales == f.scales);
        for (std::size_t si = 0; si < 2; ++si)
            for (int x = 0; x < 32; ++x)
                for (std::size_t e = 0; e < f.psi[si][x].size(); ++e)
                    CHECK(g.psi[si][x].val[e] == f.psi[si][x].val[e]);
    }

    SUBCASE("even-vertex net of C_32 transfers within a factor 4") {
        int m = 16;
        std::vector<double> nd(static_cast<std::size_t>(m) * m);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < m; ++j)
                nd[static_cast<std::size_t>(i) * m + j] = c32->dist(2 * i, 2 * j);
        auto net = std::make_shared<FiniteSpace>(m, nd);
        std::vector<int> incl(m), retr(32);
        for (int i = 0; i < m; ++i) incl[i] = 2 * i;
        for (int y = 0; y < 32; ++y) retr[y] = y / 2;
        WitnessFamily f = doubling_family(net, 2.0, {2, 4, 8});
        WitnessFamily g = net_transfer(f, c32, incl, retr, 1.0);
        CHECK(g.scales == std::vector<int>{3, 5, 9});

        NormalizeResult nf = normalize(f), ng = normalize(g);
        for (std::size_t i = 0; i < 3; ++i) {
            double a = nf.profile.samples[i].J;
            double b = ng.profile.samples[i].J;
            CHECK(b >= a / 4.0 - 1e-9);
            CHECK(b <= 4.0 * a + 1e-9);
        }

        SUBCASE("supports stay inside the bumped balls") {
            for (std::size_t si = 0; si < g.scales.size(); ++si)
                for (int y = 0; y < 32; ++y)
                    for (std::size_t e = 0; e < g.psi[si][y].size(); ++e)
                        CHECK(c32->dist(y, g.psi[si][y].idx[e]) <= g.scales[si] + 1e-9);
        }
    }

    SUBCASE("displacement violations are rejected") {
        WitnessFamily f = subexp_family(c32, {2});
        std::vector<int> incl(32), retr(32);
        for (int i = 0; i < 32; ++i) incl[i] = i;
        for (int y = 0; y < 32; ++y) retr[y] = 0; // everything to vertex 0
        CHECK_THROWS_AS(net_transfer(f, c32, incl, retr, 1.0), BadRetraction);
    }
}

TEST_CASE("subexp L^1 estimate") {
    auto c64 = make("cycle:64");

    SUBCASE("adjacent pairs on C_64 stay under the bound, exhaustively") {
        WitnessFamily f2 = subexp_family(c64, {4, 8, 16});
        L1BoundReport rep = subexp_l1_bound_check(f2, 1);
        CHECK(rep.pass);
        // C_h on a cycle peaks at r = 1: V(x,2)/V(x,1) = 5/3
        CHECK(rep.C_h == doctest::Approx(5.0 / 3.0));
        for (const auto& ps : rep.scales) CHECK(ps.max_lhs <= ps.bound + 1e-9);
    }

    SUBCASE("binary tree depth 8, h=1") {
        auto t8 = make("binary_tree:8");
        WitnessFamily ft = subexp_family(t8, {4, 8});
        L1BoundReport rep = subexp_l1_bound_check(ft, 1);
        CHECK(rep.pass);
    }
}

TEST_SUITE_END();
