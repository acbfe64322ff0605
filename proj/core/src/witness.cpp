#include "coarse/witness.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "coarse/errors.hpp"
#include "coarse/parallel.hpp"

namespace coarse {

namespace {
constexpr double kTol = 1e-9;

void check_scales(const std::vector<int>& scales) {
    if (scales.empty()) throw InvalidSpace("need at least one scale");
    for (std::size_t i = 0; i < scales.size(); ++i) {
        if (scales[i] < 1) throw InvalidSpace("scales must be >= 1");
        if (i && scales[i] <= scales[i - 1]) throw InvalidSpace("scales must be increasing");
    }
}

// smallest integer k >= max(1, d), with a tolerance so integer metrics stay exact
int min_cover_radius(double d) {
    if (d <= 1.0 + kTol) return 1;
    return static_cast<int>(std::ceil(d - kTol));
}

// vmin on the integer radius grid 1..rmax
std::vector<double> vmin_grid(const FiniteSpace& s, int rmax) {
    std::vector<double> v(rmax + 1, std::numeric_limits<double>::infinity());
    for (int x = 0; x < s.n(); ++x)
        for (int r = 1; r <= rmax; ++r)
            v[r] = std::min(v[r], volume(s, x, static_cast<double>(r)));
    return v;
}

double pair_ratio_max_edges(const WitnessFamily& f, std::size_t si) {
    const FiniteSpace& s = *f.space;
    const auto& edges = *s.geodesic_edges();
    double best = 0.0;
    std::vector<double> buf;
    for (const auto& e : edges) {
        double d = s.dist(e.u, e.v);
        if (d <= 0.0) continue;
        double diff = std::pow(lp_diff_pow(f.psi[si][e.u], f.psi[si][e.v], f.p,
                                           s.measures(), buf),
                               1.0 / f.p);
        best = std::max(best, diff / d);
    }
    return best;
}

double pair_ratio_max_all(const WitnessFamily& f, std::size_t si) {
    const FiniteSpace& s = *f.space;
    int n = s.n();
    std::vector<double> per_row(n, 0.0);
    parallel_for(n, [&](int x) {
        std::vector<double> buf;
        double best = 0.0;
        for (int y = x + 1; y < n; ++y) {
            double d = s.dist(x, y);
            if (d <= 0.0) continue;
            double diff = std::pow(
                lp_diff_pow(f.psi[si][x], f.psi[si][y], f.p, s.measures(), buf), 1.0 / f.p);
            best = std::max(best, diff / d);
        }
        per_row[x] = best;
    });
    double best = 0.0;
    for (double v : per_row) best = std::max(best, v);
    return best;
}

double lipschitz_constant(const WitnessFamily& f, std::size_t si) {
    if (f.space->geodesic_edges()) return pair_ratio_max_edges(f, si);
    return pair_ratio_max_all(f, si);
}

} // namespace

int WitnessFamily::scale_index(int n) const {
    for (std::size_t i = 0; i < scales.size(); ++i)
        if (scales[i] == n) return static_cast<int>(i);
    return -1;
}

const SparseVec& WitnessFamily::at(int scale_n, int x) const {
    int si = scale_index(scale_n);
    if (si < 0) throw MissingScale("scale " + std::to_string(scale_n) + " not in family");
    return psi[si][x];
}

double AProfile::J_at(int n) const {
    for (const auto& s : samples)
        if (s.n == n) return s.J;
    throw MissingScale("no profile sample at scale " + std::to_string(n));
}

double AProfile::lipschitz_at(int n) const {
    for (const auto& s : samples)
        if (s.n == n) return s.lipschitz;
    throw MissingScale("no profile sample at scale " + std::to_string(n));
}

WitnessFamily subexp_family(std::shared_ptr<const FiniteSpace> s,
                            const std::vector<int>& scales) {
    check_scales(scales);
    const FiniteSpace& sp = *s;
    WitnessFamily f;
    f.p = 1.0;
    f.scales = scales;
    f.space = s;
    f.psi.resize(scales.size());
    for (std::size_t si = 0; si < scales.size(); ++si) {
        int n = scales[si];
        auto& layer = f.psi[si];
        layer.resize(sp.n());
        parallel_for(sp.n(), [&, n](int x) {
            // suffix[k] = sum_{j=k..n} 1/V(x,j); psi(y) = suffix[max(1,ceil d)] / n
            std::vector<double> suffix(n + 2, 0.0);
            for (int k = n; k >= 1; --k)
                suffix[k] = suffix[k + 1] + 1.0 / volume(sp, x, static_cast<double>(k));
            SparseVec v;
            for (int y = 0; y < sp.n(); ++y) {
                double d = sp.dist(x, y);
                if (d > static_cast<double>(n) + kTol) continue;
                v.push(y, suffix[min_cover_radius(d)] / n);
            }
            layer[x] = std::move(v);
        });
    }
    return f;
}

WitnessFamily uniform_volume_family(std::shared_ptr<const FiniteSpace> s, double p,
                                    const std::vector<int>& scales) {
    check_scales(scales);
    if (!(p >= 1.0)) throw BadExponent("p must be >= 1");
    const FiniteSpace& sp = *s;
    int nmax = scales.back();
    std::vector<double> v = vmin_grid(sp, nmax);
    if (v[1] >= v[nmax] - kTol)
        throw DegenerateProfile("lower volume function is constant over all radii");

    // k(m) = sup{k in [0, m-1] : v(m-k) >= v(m)/2}
    auto kfun = [&](int m) {
        int best = 0;
        for (int k = 0; k < m; ++k)
            if (v[m - k] >= v[m] / 2.0 - kTol) best = k;
        return best;
    };
    std::vector<int> kval(nmax + 1, 0);
    for (int m = 1; m <= nmax; ++m) kval[m] = kfun(m);

    WitnessFamily f;
    f.p = p;
    f.scales = scales;
    f.space = s;
    f.psi.resize(scales.size());
    for (std::size_t si = 0; si < scales.size(); ++si) {
        int n = scales[si];
        int jn = 0;
        for (int j = 1; j <= n; ++j) jn = std::max(jn, kval[j]);
        int qn = 1;
        for (int j = 1; j <= n; ++j)
            if (kval[j] == jn) qn = j; // largest realizer
        double coeff = std::pow(v[qn], -1.0 / p);
        auto& layer = f.psi[si];
        layer.resize(sp.n());
        parallel_for(sp.n(), [&, qn, coeff](int x) {
            SparseVec vec;
            for (int y = 0; y < sp.n(); ++y) {
                double d = sp.dist(x, y);
                if (d > static_cast<double>(qn - 1) + kTol) continue;
                int kmin = min_cover_radius(d);
                int count = qn - kmin; // indicators k = kmin .. qn-1
                if (count <= 0) continue;
                vec.push(y, coeff * count);
            }
            layer[x] = std::move(vec);
        });
    }
    return f;
}

WitnessFamily doubling_family(std::shared_ptr<const FiniteSpace> s, double p,
                              const std::vector<int>& scales) {
    check_scales(scales);
    if (!(p >= 1.0)) throw BadExponent("p must be >= 1");
    const FiniteSpace& sp = *s;
    int nmax = scales.back();
    std::vector<double> v = vmin_grid(sp, nmax);

    WitnessFamily f;
    f.p = p;
    f.scales = scales;
    f.space = s;
    f.psi.resize(scales.size());

    std::vector<double> radii;
    for (int r = 1; r <= nmax; ++r) radii.push_back(r);
    GrowthProfile gp = growth_profile(sp, radii);
    double unif = 0.0;
    for (double u : gp.uniformity) unif = std::max(unif, u);
    if (unif > 8.0)
        f.warnings.push_back("uniformity ratio " + std::to_string(unif) +
                             " exceeds 8; doubling hypothesis is doubtful here");

    for (std::size_t si = 0; si < scales.size(); ++si) {
        int n = scales[si];
        int k0 = std::max(1, n / 2);
        // weight(y) = sum_{k=max(k0, cover(d)) .. n} v(k)^{-1/p}
        std::vector<double> suffix(n + 2, 0.0);
        for (int k = n; k >= k0; --k) suffix[k] = suffix[k + 1] + std::pow(v[k], -1.0 / p);
        auto& layer = f.psi[si];
        layer.resize(sp.n());
        parallel_for(sp.n(), [&, n, k0](int x) {
            SparseVec vec;
            for (int y = 0; y < sp.n(); ++y) {
                double d = sp.dist(x, y);
                if (d > static_cast<double>(n) + kTol) continue;
                int kmin = std::max(k0, min_cover_radius(d));
                vec.push(y, suffix[kmin]);
            }
            layer[x] = std::move(vec);
        });
    }
    return f;
}

AProfile measure_profile(const WitnessFamily& f) {
    const FiniteSpace& s = *f.space;
    double halfdiam = s.diameter() / 2.0;
    AProfile prof;
    for (std::size_t si = 0; si < f.scales.size(); ++si) {
        int n = f.scales[si];
        // support invariant, exact
        for (int x = 0; x < s.n(); ++x)
            for (std::size_t e = 0; e < f.psi[si][x].size(); ++e) {
                if (f.psi[si][x].val[e] == 0.0) continue;
                if (s.dist(x, f.psi[si][x].idx[e]) > static_cast<double>(n) + kTol)
                    throw SupportViolation("psi charges a point outside B(x,n) at scale " +
                                           std::to_string(n));
            }
        std::vector<double> norms(s.n());
        parallel_for(s.n(), [&](int x) {
            std::vector<double> buf;
            norms[x] = std::pow(lp_norm_pow(f.psi[si][x], f.p, s.measures(), buf), 1.0 / f.p);
        });
        double J = *std::min_element(norms.begin(), norms.end());
        double L = lipschitz_constant(f, si);
        prof.samples.push_back({n, J, L, n > halfdiam});
    }
    return prof;
}

NormalizeResult normalize(const WitnessFamily& f) {
    NormalizeResult out;
    out.family = f;
    const FiniteSpace& s = *f.space;
    double halfdiam = s.diameter() / 2.0;
    for (std::size_t si = 0; si < f.scales.size(); ++si) {
        double L = lipschitz_constant(f, si);
        double div = L > 0.0 ? L : 1.0;
        for (auto& vec : out.family.psi[si]) vec.scale(1.0 / div);
        std::vector<double> norms(s.n());
        parallel_for(s.n(), [&](int x) {
            std::vector<double> buf;
            norms[x] =
                std::pow(lp_norm_pow(out.family.psi[si][x], f.p, s.measures(), buf), 1.0 / f.p);
        });
        double J = *std::min_element(norms.begin(), norms.end());
        out.profile.samples.push_back({f.scales[si], J, L, f.scales[si] > halfdiam});
    }
    return out;
}

WitnessFamily p_convert(const WitnessFamily& f, double q) {
    if (q < f.p - 1e-12) throw BadExponent("p_convert needs q >= p");
    WitnessFamily out = f;
    if (q == f.p) return out;
    double theta = f.p / q;
    out.p = q;
    for (auto& layer : out.psi)
        for (auto& vec : layer) vec.pow_inplace(theta);
    for (std::size_t si = 0; si < out.scales.size(); ++si) {
        double L = lipschitz_constant(out, si);
        if (L > 1.0 + 1e-12)
            for (auto& vec : out.psi[si]) vec.scale(1.0 / L);
    }
    return out;
}

WitnessFamily net_transfer(const WitnessFamily& f,
                           std::shared_ptr<const FiniteSpace> ambient,
                           const std::vector<int>& inclusion,
                           const std::vector<int>& retraction, double c) {
    const FiniteSpace& X = *f.space;
    const FiniteSpace& Y = *ambient;
    if (inclusion.size() != static_cast<std::size_t>(X.n()))
        throw BadRetraction("inclusion must map every net point into the ambient space");
    if (retraction.size() != static_cast<std::size_t>(Y.n()))
        throw BadRetraction("retraction must be defined on every ambient point");
    for (int i = 0; i < X.n(); ++i)
        for (int j = i + 1; j < X.n(); ++j)
            if (std::fabs(X.dist(i, j) - Y.dist(inclusion[i], inclusion[j])) >
                kTol * std::max(1.0, X.dist(i, j)))
                throw BadRetraction("net metric does not match the induced metric");
    for (int y = 0; y < Y.n(); ++y) {
        int rx = retraction[y];
        if (rx < 0 || rx >= X.n()) throw BadRetraction("retraction image out of range");
        if (Y.dist(y, inclusion[rx]) > c + kTol)
            throw BadRetraction("retraction displacement exceeds c");
    }

    int bump = static_cast<int>(std::ceil(c - kTol));
    WitnessFamily out;
    out.p = f.p;
    out.space = ambient;
    out.psi.resize(f.scales.size());
    for (std::size_t si = 0; si < f.scales.size(); ++si) {
        out.scales.push_back(f.scales[si] + bump);
        auto& layer = out.psi[si];
        layer.resize(Y.n());
        for (int y = 0; y < Y.n(); ++y) {
            const SparseVec& src = f.psi[si][retraction[y]];
            SparseVec vec;
            for (std::size_t e = 0; e < src.size(); ++e)
                vec.push(inclusion[src.idx[e]], src.val[e]);
            std::vector<std::size_t> order(vec.size());
            for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
            std::sort(order.begin(), order.end(),
                      [&](std::size_t a, std::size_t b) { return vec.idx[a] < vec.idx[b]; });
            SparseVec sorted;
            for (std::size_t i : order) sorted.push(vec.idx[i], vec.val[i]);
            layer[y] = std::move(sorted);
        }
    }
    return out;
}

L1BoundReport subexp_l1_bound_check(const WitnessFamily& f, int h) {
    if (f.p != 1.0) throw BadExponent("the L^1 estimate applies to the p=1 family");
    if (h < 1) throw InvalidSpace("h must be >= 1");
    const FiniteSpace& s = *f.space;
    int diam = static_cast<int>(std::floor(s.diameter() + kTol));

    L1BoundReport rep;
    for (int x = 0; x < s.n(); ++x)
        for (int r = 1; r <= diam; ++r)
            rep.C_h = std::max(rep.C_h, volume(s, x, static_cast<double>(r + h)) /
                                            volume(s, x, static_cast<double>(r)));

    std::vector<double> r1 = {1.0};
    for (std::size_t si = 0; si < f.scales.size(); ++si) {
        int n = f.scales[si];
        double vmax_nh = 0.0, vmin_1 = std::numeric_limits<double>::infinity();
        for (int x = 0; x < s.n(); ++x) {
            vmax_nh = std::max(vmax_nh, volume(s, x, static_cast<double>(n + h)));
            vmin_1 = std::min(vmin_1, volume(s, x, 1.0));
        }
        double bound = (2.0 * h * rep.C_h / n) * std::log(vmax_nh / vmin_1);
        L1BoundReport::PerScale ps{n, bound, 0.0, -bound, -1, -1};
        std::vector<double> buf;
        for (int x = 0; x < s.n(); ++x)
            for (int y = x + 1; y < s.n(); ++y) {
                if (s.dist(x, y) > static_cast<double>(h) + kTol) continue;
                double lhs = lp_diff_pow(f.psi[si][x], f.psi[si][y], 1.0, s.measures(), buf);
                if (lhs > ps.max_lhs) ps.max_lhs = lhs;
                if (lhs - bound > ps.max_slack) {
                    ps.max_slack = lhs - bound;
                    ps.worst_x = x;
                    ps.worst_y = y;
                }
            }
        if (ps.max_slack > kTol) rep.pass = false;
        rep.scales.push_back(ps);
    }
    return rep;
}

} // namespace coarse
