#include "coarse/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "coarse/errors.hpp"
#include "coarse/parallel.hpp"

namespace coarse {

namespace {
constexpr double kTol = 1e-9;

int dist_bucket(const std::vector<double>& grid, double d) {
    // grid is sorted distinct positive distances; d matches one of them
    auto it = std::lower_bound(grid.begin(), grid.end(), d - kTol * std::max(1.0, d));
    return static_cast<int>(it - grid.begin());
}
} // namespace

double RateFunction::operator()(double t) const {
    if (std::isinf(b)) return 0.0;
    double base = std::log(std::exp(1.0) + t);
    return std::pow(t, a) * std::pow(base, -b);
}

bool RateFunction::nondecreasing_on(const std::vector<double>& grid) const {
    double prev = -std::numeric_limits<double>::infinity();
    for (double t : grid) {
        double v = (*this)(t);
        if (v < prev - kTol) return false;
        prev = v;
    }
    return true;
}

ConditionReport condition_check(const RateFunction& f, const RateFunction& J, double p) {
    ConditionReport rep;
    if (std::isinf(f.b)) {
        rep.verdict = ConditionVerdict::converges; // zero rate
        return rep;
    }
    double da = f.a - J.a;
    double db = f.b - J.b;
    if (da < 0.0)
        rep.verdict = ConditionVerdict::converges;
    else if (da > 0.0)
        rep.verdict = ConditionVerdict::diverges;
    else
        rep.verdict = db * p > 1.0 ? ConditionVerdict::converges : ConditionVerdict::diverges;
    return rep;
}

ConditionReport condition_check(const RateFunction& f, const AProfile& J, double p) {
    ConditionReport rep;
    rep.verdict = ConditionVerdict::inconclusive;
    double acc = 0.0;
    for (const auto& s : J.samples) {
        double ratio = s.J > 0.0 ? f(static_cast<double>(s.n)) / s.J
                                 : std::numeric_limits<double>::infinity();
        acc += std::pow(ratio, p);
        rep.partial_sums.push_back(acc);
    }
    return rep;
}

double Embedding::pair_distance(int x, int y) const {
    const auto& mu = space->measures();
    std::vector<double> buf;
    double acc = 0.0;
    for (std::size_t ki = 0; ki < scale_ks.size(); ++ki) {
        if (weights[ki] == 0.0) continue;
        double d = lp_diff_pow(psi[ki][x], psi[ki][y], p, mu, buf);
        acc += std::pow(weights[ki], p) * d;
    }
    return std::pow(acc, 1.0 / p);
}

SparseVec Embedding::block(std::size_t ki, int x) const {
    const SparseVec& a = psi[ki][x];
    const SparseVec& b = psi[ki][base];
    SparseVec out;
    std::size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        if (j == b.size() || (i < a.size() && a.idx[i] < b.idx[j])) {
            out.push(a.idx[i], weights[ki] * a.val[i]);
            ++i;
        } else if (i == a.size() || b.idx[j] < a.idx[i]) {
            out.push(b.idx[j], -weights[ki] * b.val[j]);
            ++j;
        } else {
            double v = weights[ki] * (a.val[i] - b.val[j]);
            if (v != 0.0) out.push(a.idx[i], v);
            ++i;
            ++j;
        }
    }
    return out;
}

namespace {

Embedding build_embedding_common(const WitnessFamily& fam, const AProfile& profile,
                                 int base, int kmax,
                                 const std::function<double(int, double)>& weight_of) {
    if (base < 0 || base >= fam.space->n()) throw InvalidSpace("base point out of range");
    Embedding e;
    e.p = fam.p;
    e.base = base;
    e.space = fam.space;
    for (int k = 0; k <= kmax; ++k) {
        int n = 1 << k;
        int si = fam.scale_index(n);
        if (si < 0)
            throw MissingScale("family lacks the dyadic scale " + std::to_string(n));
        double J = profile.J_at(n);
        double w = weight_of(k, J);
        if (!std::isfinite(w))
            throw Degenerate("scale " + std::to_string(n) +
                             " has J = 0; cannot weight this block");
        e.scale_ks.push_back(k);
        e.weights.push_back(w);
        e.block_J.push_back(J);
        e.psi.push_back(fam.psi[si]);
    }
    return e;
}

} // namespace

Embedding build_uniform_embedding(const WitnessFamily& fam, const AProfile& profile,
                                  const RateFunction& f, int base, int kmax) {
    Embedding e = build_embedding_common(fam, profile, base, kmax, [&](int k, double J) {
        double fv = f(static_cast<double>(1 << k));
        if (fv == 0.0) return 0.0;
        return fv / J;
    });
    // Weight tail check: nondecreasing ratios over the top half signal a
    // divergent condition; emit a warning and leave subsequence_select to callers.
    std::size_t m = e.weights.size();
    if (m >= 4) {
        bool shrinks = false;
        for (std::size_t i = m / 2; i + 1 < m; ++i)
            if (std::pow(e.weights[i + 1], e.p) < std::pow(e.weights[i], e.p) - kTol)
                shrinks = true;
        double tail = std::pow(e.weights[m - 1], e.p);
        if (!shrinks && tail > kTol)
            e.warnings.push_back(
                "weight tail is not shrinking; condition (J,p) looks divergent, "
                "consider subsequence_select");
    }
    return e;
}

Embedding build_distortion_embedding(const WitnessFamily& fam, const AProfile& profile,
                                     int base) {
    double diam = fam.space->diameter();
    int kmax = diam > 2.0 ? static_cast<int>(std::floor(std::log2(diam / 2.0) + kTol)) : 0;
    return build_embedding_common(fam, profile, base, kmax, [&](int k, double J) {
        return static_cast<double>(1 << k) / J;
    });
}

SubsequenceSelection subsequence_select(const AProfile& profile, const RateFunction& f,
                                        double p) {
    SubsequenceSelection sel;
    double budget = 1.0;
    for (const auto& s : profile.samples) {
        // dyadic scales only
        int k = 0;
        while ((1 << k) < s.n) ++k;
        if ((1 << k) != s.n) continue;
        double fv = f(static_cast<double>(s.n));
        double ratio_pow =
            s.J > 0.0 ? std::pow(fv / s.J, p)
                      : (fv == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
        if (sel.budget_used + ratio_pow <= budget + 1e-12) {
            sel.scale_ks.push_back(k);
            sel.guarantees.push_back(fv);
            sel.budget_used += ratio_pow;
        }
    }
    if (sel.scale_ks.empty())
        throw NoSubsequence("no scale fits within the unit budget");
    return sel;
}

namespace {

// One pass over pairs: per-distance-bucket min and max of ||F(x)-F(y)||.
struct PairScan {
    std::vector<double> grid;
    std::vector<double> bucket_min, bucket_max;
};

PairScan scan_pairs(const Embedding& e) {
    const FiniteSpace& s = *e.space;
    PairScan ps;
    ps.grid = s.distance_grid();
    int m = static_cast<int>(ps.grid.size());
    int n = s.n();
    std::vector<std::vector<double>> row_min(n), row_max(n);
    parallel_for(n, [&](int x) {
        row_min[x].assign(m, std::numeric_limits<double>::infinity());
        row_max[x].assign(m, 0.0);
        for (int y = x + 1; y < n; ++y) {
            double d = s.dist(x, y);
            if (d <= 0.0) continue;
            int b = dist_bucket(ps.grid, d);
            double v = e.pair_distance(x, y);
            row_min[x][b] = std::min(row_min[x][b], v);
            row_max[x][b] = std::max(row_max[x][b], v);
        }
    });
    ps.bucket_min.assign(m, std::numeric_limits<double>::infinity());
    ps.bucket_max.assign(m, 0.0);
    for (int x = 0; x < n; ++x)
        for (int b = 0; b < m; ++b) {
            ps.bucket_min[b] = std::min(ps.bucket_min[b], row_min[x][b]);
            ps.bucket_max[b] = std::max(ps.bucket_max[b], row_max[x][b]);
        }
    return ps;
}

std::pair<double, double> fit_affine(const Profile& delta) {
    // minimize a + b subject to a t_i + b >= delta_i, a, b >= 0;
    // candidate vertices come from constraint pairs and the axes
    std::size_t m = delta.t.size();
    if (m == 0) return {0.0, 0.0};
    auto feasible = [&](double a, double b) {
        for (std::size_t i = 0; i < m; ++i)
            if (a * delta.t[i] + b < delta.value[i] - 1e-9) return false;
        return true;
    };
    double best_a = 0.0, best_b = 0.0, best_cost = std::numeric_limits<double>::infinity();
    auto consider = [&](double a, double b) {
        if (a < 0.0 || b < 0.0) return;
        if (!feasible(a, b)) return;
        double cost = a + b;
        if (cost < best_cost - 1e-15 ||
            (std::fabs(cost - best_cost) <= 1e-15 && a < best_a)) {
            best_cost = cost;
            best_a = a;
            best_b = b;
        }
    };
    double ratio_max = 0.0, val_max = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        ratio_max = std::max(ratio_max, delta.value[i] / delta.t[i]);
        val_max = std::max(val_max, delta.value[i]);
    }
    consider(ratio_max, 0.0);
    consider(0.0, val_max);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j) {
            double dt = delta.t[j] - delta.t[i];
            if (std::fabs(dt) < 1e-15) continue;
            double a = (delta.value[j] - delta.value[i]) / dt;
            double b = delta.value[i] - a * delta.t[i];
            consider(a, b);
        }
    return {best_a, best_b};
}

} // namespace

Profile compression(const Embedding& e) {
    PairScan ps = scan_pairs(e);
    Profile rho;
    rho.t = ps.grid;
    int m = static_cast<int>(ps.grid.size());
    rho.value.assign(m, 0.0);
    double suffix = std::numeric_limits<double>::infinity();
    for (int b = m - 1; b >= 0; --b) {
        suffix = std::min(suffix, ps.bucket_min[b]);
        rho.value[b] = suffix;
    }
    return rho;
}

Profile dilation(const Embedding& e) {
    PairScan ps = scan_pairs(e);
    Profile delta;
    delta.t = ps.grid;
    int m = static_cast<int>(ps.grid.size());
    delta.value.assign(m, 0.0);
    double prefix = 0.0;
    for (int b = 0; b < m; ++b) {
        prefix = std::max(prefix, ps.bucket_max[b]);
        delta.value[b] = prefix;
    }
    return delta;
}

EmbeddingProfiles embedding_profiles(const Embedding& e) {
    PairScan ps = scan_pairs(e);
    EmbeddingProfiles out;
    int m = static_cast<int>(ps.grid.size());
    out.rho.t = out.delta.t = out.theta.t = ps.grid;
    out.rho.value.assign(m, 0.0);
    out.delta.value.assign(m, 0.0);
    out.theta.value.assign(m, 0.0);
    out.theta.flagged.assign(m, false);
    double suffix = std::numeric_limits<double>::infinity();
    for (int b = m - 1; b >= 0; --b) {
        suffix = std::min(suffix, ps.bucket_min[b]);
        out.rho.value[b] = suffix;
    }
    double prefix = 0.0;
    for (int b = 0; b < m; ++b) {
        prefix = std::max(prefix, ps.bucket_max[b]);
        out.delta.value[b] = prefix;
    }
    for (int b = 0; b < m; ++b) {
        double t = ps.grid[b], r = out.rho.value[b], d = out.delta.value[b];
        if (r <= 0.0 || d <= 0.0) {
            out.theta.flagged[b] = true;
            continue;
        }
        out.theta.value[b] =
            std::exp(std::fabs(std::log(r / t)) + std::fabs(std::log(d / t)));
    }
    auto [a, b] = fit_affine(out.delta);
    out.fit_a = a;
    out.fit_b = b;
    return out;
}

double distortion(const Embedding& e) {
    const FiniteSpace& s = *e.space;
    int n = s.n();
    std::vector<double> exp_row(n, 0.0), con_row(n, 0.0);
    std::vector<char> degen(n, 0);
    parallel_for(n, [&](int x) {
        for (int y = x + 1; y < n; ++y) {
            double d = s.dist(x, y);
            if (d <= 0.0) continue;
            double v = e.pair_distance(x, y);
            if (v <= 0.0) {
                degen[x] = 1;
                continue;
            }
            exp_row[x] = std::max(exp_row[x], v / d);
            con_row[x] = std::max(con_row[x], d / v);
        }
    });
    for (int x = 0; x < n; ++x)
        if (degen[x]) throw Degenerate("two points collide in the embedding");
    double ex = 0.0, co = 0.0;
    for (int x = 0; x < n; ++x) {
        ex = std::max(ex, exp_row[x]);
        co = std::max(co, con_row[x]);
    }
    if (n == 1) return 1.0;
    return ex * co;
}

double empirical_rate(const Profile& prof) {
    std::vector<std::pair<double, double>> pts; // (log t, log value)
    for (std::size_t i = 0; i < prof.t.size(); ++i)
        if (prof.t[i] > 0.0 && prof.value[i] > 0.0)
            pts.emplace_back(std::log(prof.t[i]), std::log(prof.value[i]));
    if (pts.size() < 8)
        throw InsufficientData("need at least 8 positive grid points for a rate fit");
    // fit window: the top half of the positive grid
    std::size_t lo = pts.size() / 2;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t m = pts.size() - lo;
    for (std::size_t i = lo; i < pts.size(); ++i) {
        sx += pts[i].first;
        sy += pts[i].second;
        sxx += pts[i].first * pts[i].first;
        sxy += pts[i].first * pts[i].second;
    }
    double denom = m * sxx - sx * sx;
    if (std::fabs(denom) < 1e-15) throw InsufficientData("degenerate fit window");
    return (m * sxy - sx * sy) / denom;
}

AuditReport disjoint_support_audit(const Embedding& e) {
    const FiniteSpace& s = *e.space;
    int n = s.n();
    double c = std::pow(2.0, 1.0 / e.p);
    AuditReport rep;
    rep.min_slack = std::numeric_limits<double>::infinity();
    for (std::size_t ki = 0; ki < e.scale_ks.size(); ++ki) {
        double scale = static_cast<double>(1 << e.scale_ks[ki]);
        double lower = c * e.weights[ki] * e.block_J[ki];
        std::vector<double> worst(n, std::numeric_limits<double>::infinity());
        parallel_for(n, [&](int x) {
            for (int y = x + 1; y < n; ++y) {
                if (s.dist(x, y) <= 2.0 * scale) continue;
                worst[x] = std::min(worst[x], e.pair_distance(x, y) - lower);
            }
        });
        for (double w : worst) rep.min_slack = std::min(rep.min_slack, w);
    }
    if (!std::isfinite(rep.min_slack)) rep.min_slack = 0.0; // no qualifying pairs
    rep.pass = rep.min_slack >= -kTol;
    if (!rep.pass) rep.detail = "disjoint-support lower bound violated";
    return rep;
}

AuditReport lipschitz_audit(const Embedding& e) {
    const FiniteSpace& s = *e.space;
    int n = s.n();
    double sum = 0.0;
    for (double w : e.weights) sum += std::pow(w, e.p);
    double lip = std::pow(sum, 1.0 / e.p);
    AuditReport rep;
    rep.min_slack = std::numeric_limits<double>::infinity();
    std::vector<double> worst(n, std::numeric_limits<double>::infinity());
    parallel_for(n, [&](int x) {
        for (int y = x + 1; y < n; ++y) {
            double d = s.dist(x, y);
            if (d <= 0.0) continue;
            worst[x] = std::min(worst[x], d * lip - e.pair_distance(x, y));
        }
    });
    for (double w : worst) rep.min_slack = std::min(rep.min_slack, w);
    if (!std::isfinite(rep.min_slack)) rep.min_slack = 0.0;
    rep.pass = rep.min_slack >= -kTol * std::max(1.0, lip * s.diameter());
    if (!rep.pass) rep.detail = "Lipschitz partial-sum bound violated";
    return rep;
}

DistortionBound distortion_upper_bound(const Embedding& e) {
    DistortionBound b{};
    double sum = 0.0;
    for (std::size_t ki = 0; ki < e.scale_ks.size(); ++ki)
        sum += std::pow(static_cast<double>(1 << e.scale_ks[ki]) / e.block_J[ki], e.p);
    b.dyadic_sum_form = 2.0 * std::pow(sum, 1.0 / e.p);

    // trapezoid of (t/J(t))^p dt/t on the distance grid with J interpolated
    // log-linearly between the dyadic samples
    const FiniteSpace& s = *e.space;
    std::vector<double> grid = s.distance_grid();
    double upper = s.diameter() / 4.0;
    auto Jof = [&](double t) {
        // piecewise linear in log t through (2^k, J(2^k))
        if (e.scale_ks.empty()) return 1.0;
        double lt = std::log2(std::max(t, 1.0));
        std::size_t hi = 0;
        while (hi + 1 < e.scale_ks.size() && e.scale_ks[hi + 1] <= lt) ++hi;
        std::size_t lo = hi;
        if (hi + 1 < e.scale_ks.size()) hi = hi + 1;
        double k0 = e.scale_ks[lo], k1 = e.scale_ks[hi];
        double J0 = e.block_J[lo], J1 = e.block_J[hi];
        if (hi == lo || k1 == k0) return J0;
        double u = (lt - k0) / (k1 - k0);
        return J0 + u * (J1 - J0);
    };
    double integral = 0.0;
    double prev_t = 1.0;
    double prev_f = std::pow(prev_t / Jof(prev_t), e.p) / prev_t;
    for (double t : grid) {
        if (t <= 1.0) continue;
        double tt = std::min(t, upper);
        if (tt <= prev_t) continue;
        double f = std::pow(tt / Jof(tt), e.p) / tt;
        integral += 0.5 * (prev_f + f) * (tt - prev_t);
        prev_t = tt;
        prev_f = f;
        if (t >= upper) break;
    }
    b.integral_form = 2.0 * std::pow(integral, 1.0 / e.p);
    return b;
}

} // namespace coarse
