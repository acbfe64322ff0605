#include "coarse/space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <random>

#include "coarse/errors.hpp"
#include "coarse/parallel.hpp"

namespace coarse {

namespace {
constexpr double kRelTol = 1e-9;
constexpr double kInf = std::numeric_limits<double>::infinity();

bool tri_ok(double dik, double dij, double djk) {
    double rhs = dij + djk;
    return dik <= rhs + kRelTol * std::max(1.0, rhs);
}
} // namespace

FiniteSpace::FiniteSpace(int n, std::vector<double> dist_rowmajor,
                         std::vector<double> measure, std::vector<std::string> labels)
    : n_(n), dist_(std::move(dist_rowmajor)), measure_(std::move(measure)),
      labels_(std::move(labels)) {
    if (n_ <= 0) throw InvalidSpace("space needs at least one point");
    if (n_ > kMaxPoints) throw InvalidSpace("space exceeds the documented n <= 20000 cap");
    if (dist_.size() != static_cast<std::size_t>(n_) * n_)
        throw InvalidSpace("distance matrix size mismatch");
    if (measure_.empty()) measure_.assign(n_, 1.0);
    if (measure_.size() != static_cast<std::size_t>(n_))
        throw InvalidSpace("measure length mismatch");
    for (double m : measure_)
        if (!(m > 0.0)) throw InvalidSpace("measure must be positive");
    if (!labels_.empty() && labels_.size() != static_cast<std::size_t>(n_))
        throw InvalidSpace("label count mismatch");

    for (int i = 0; i < n_; ++i) {
        if (dist(i, i) != 0.0) throw InvalidSpace("nonzero diagonal distance");
        for (int j = i + 1; j < n_; ++j) {
            double a = dist(i, j), b = dist(j, i);
            if (!(a >= 0.0) || !std::isfinite(a))
                throw InvalidSpace("distances must be finite and nonnegative");
            if (std::fabs(a - b) > kRelTol * std::max(1.0, std::fabs(a)))
                throw InvalidSpace("distance matrix not symmetric");
            double m = 0.5 * (a + b);
            dist_[static_cast<std::size_t>(i) * n_ + j] = m;
            dist_[static_cast<std::size_t>(j) * n_ + i] = m;
        }
    }

    // Triangle inequality: exhaustive up to n=512, deterministic sampling beyond.
    if (n_ <= 512) {
        for (int j = 0; j < n_; ++j)
            for (int i = 0; i < n_; ++i) {
                if (i == j) continue;
                double dij = dist(i, j);
                const double* row_j = &dist_[static_cast<std::size_t>(j) * n_];
                const double* row_i = &dist_[static_cast<std::size_t>(i) * n_];
                for (int k = 0; k < n_; ++k)
                    if (!tri_ok(row_i[k], dij, row_j[k]))
                        throw InvalidSpace("triangle inequality violated");
            }
    } else {
        std::mt19937_64 rng(0x5eedu);
        std::uniform_int_distribution<int> pick(0, n_ - 1);
        for (long t = 0; t < 2000000; ++t) {
            int i = pick(rng), j = pick(rng), k = pick(rng);
            if (!tri_ok(dist(i, k), dist(i, j), dist(j, k)))
                throw InvalidSpace("triangle inequality violated");
        }
    }

    build_volume_tables();
}

void FiniteSpace::build_volume_tables() {
    vt_.resize(n_);
    parallel_for(n_, [this](int x) {
        std::vector<int> order(n_);
        std::iota(order.begin(), order.end(), 0);
        const double* row = &dist_[static_cast<std::size_t>(x) * n_];
        std::stable_sort(order.begin(), order.end(),
                         [row](int a, int b) { return row[a] < row[b]; });
        auto& t = vt_[x];
        t.sorted_dist.resize(n_);
        t.mass_prefix.resize(n_);
        double acc = 0.0;
        for (int i = 0; i < n_; ++i) {
            t.sorted_dist[i] = row[order[i]];
            acc += measure_[order[i]];
            t.mass_prefix[i] = acc;
        }
    });
}

double FiniteSpace::diameter() const {
    double d = 0.0;
    for (double v : dist_) d = std::max(d, v);
    return d;
}

double FiniteSpace::min_positive_distance() const {
    double d = kInf;
    for (double v : dist_)
        if (v > 0.0) d = std::min(d, v);
    return d;
}

std::vector<double> FiniteSpace::distance_grid() const {
    std::vector<double> vals;
    vals.reserve(dist_.size() / 2);
    for (int i = 0; i < n_; ++i)
        for (int j = i + 1; j < n_; ++j) vals.push_back(dist(i, j));
    std::sort(vals.begin(), vals.end());
    std::vector<double> grid;
    for (double v : vals) {
        if (v <= 0.0) continue;
        if (grid.empty() || v - grid.back() > kRelTol * std::max(1.0, v)) grid.push_back(v);
    }
    return grid;
}

double FiniteSpace::total_mass() const {
    double s = 0.0;
    for (double m : measure_) s += m;
    return s;
}

FiniteSpace from_graph(const Graph& g, std::vector<double> measure) {
    if (g.n <= 0) throw InvalidSpec("graph needs at least one vertex");
    std::vector<std::vector<std::pair<int, double>>> adj(g.n);
    for (const auto& e : g.edges) {
        if (e.u < 0 || e.u >= g.n || e.v < 0 || e.v >= g.n)
            throw InvalidSpec("edge endpoint out of range");
        if (e.u == e.v) throw InvalidSpec("self-loop");
        if (!(e.length > 0.0)) throw InvalidSpec("edge length must be positive");
        adj[e.u].emplace_back(e.v, e.length);
        adj[e.v].emplace_back(e.u, e.length);
    }

    std::vector<double> dist(static_cast<std::size_t>(g.n) * g.n, kInf);
    std::vector<char> disconnected(1, 0);
    parallel_for(g.n, [&](int s) {
        double* row = &dist[static_cast<std::size_t>(s) * g.n];
        using QE = std::pair<double, int>;
        std::priority_queue<QE, std::vector<QE>, std::greater<QE>> pq;
        row[s] = 0.0;
        pq.push({0.0, s});
        while (!pq.empty()) {
            auto [d, u] = pq.top();
            pq.pop();
            if (d > row[u]) continue;
            for (auto [v, len] : adj[u]) {
                double nd = d + len;
                if (nd < row[v]) {
                    row[v] = nd;
                    pq.push({nd, v});
                }
            }
        }
        for (int v = 0; v < g.n; ++v)
            if (row[v] == kInf) disconnected[0] = 1;
    });
    if (disconnected[0]) throw DisconnectedGraph("graph is not connected");

    FiniteSpace s(g.n, std::move(dist), std::move(measure));
    s.edges_ = g.edges;
    return s;
}

std::vector<int> ball(const FiniteSpace& s, int x, double r) {
    if (x < 0 || x >= s.n()) throw InvalidSpace("point out of range");
    if (r < 0.0) throw InvalidSpace("radius must be nonnegative");
    std::vector<int> out;
    double cutoff = r + kRelTol * std::max(1.0, r);
    for (int y = 0; y < s.n(); ++y)
        if (s.dist(x, y) <= cutoff) out.push_back(y);
    return out;
}

double volume(const FiniteSpace& s, int x, double r) {
    if (x < 0 || x >= s.n()) throw InvalidSpace("point out of range");
    if (r < 0.0) throw InvalidSpace("radius must be nonnegative");
    const auto& t = s.volume_table(x);
    double cutoff = r + kRelTol * std::max(1.0, r);
    auto it = std::upper_bound(t.sorted_dist.begin(), t.sorted_dist.end(), cutoff);
    std::size_t cnt = static_cast<std::size_t>(it - t.sorted_dist.begin());
    return cnt == 0 ? 0.0 : t.mass_prefix[cnt - 1];
}

GrowthProfile growth_profile(const FiniteSpace& s, const std::vector<double>& radii) {
    for (std::size_t i = 0; i + 1 < radii.size(); ++i)
        if (!(radii[i] < radii[i + 1])) throw InvalidSpace("radii must be increasing");
    for (double r : radii)
        if (!(r > 0.0)) throw InvalidSpace("radii must be positive");
    GrowthProfile gp;
    gp.radii = radii;
    gp.vmin.assign(radii.size(), kInf);
    gp.vmax.assign(radii.size(), 0.0);
    for (int x = 0; x < s.n(); ++x) {
        for (std::size_t i = 0; i < radii.size(); ++i) {
            double v = volume(s, x, radii[i]);
            gp.vmin[i] = std::min(gp.vmin[i], v);
            gp.vmax[i] = std::max(gp.vmax[i], v);
        }
    }
    gp.uniformity.resize(radii.size());
    for (std::size_t i = 0; i < radii.size(); ++i)
        gp.uniformity[i] = gp.vmax[i] / gp.vmin[i];
    return gp;
}

double doubling_constant(const FiniteSpace& s, const std::vector<double>& radii) {
    for (double r : radii)
        if (!(r > 0.0)) throw InvalidSpace("radii must be positive");
    double c = 1.0;
    for (int x = 0; x < s.n(); ++x)
        for (double r : radii) c = std::max(c, volume(s, x, 2.0 * r) / volume(s, x, r));
    return c;
}

FiniteSpace b_geodesic_metric(const FiniteSpace& s, double b) {
    if (!(b > 0.0)) throw InvalidSpace("b must be positive");
    int n = s.n();
    double hop_cut = b + kRelTol * std::max(1.0, b);
    std::vector<double> out(static_cast<std::size_t>(n) * n, kInf);
    std::vector<char> fail(1, 0);
    // dense Dijkstra over the hop graph {(u,v) : d(u,v) <= b}
    parallel_for(n, [&](int src) {
        double* row = &out[static_cast<std::size_t>(src) * n];
        std::vector<char> done(n, 0);
        row[src] = 0.0;
        for (int step = 0; step < n; ++step) {
            int u = -1;
            double best = kInf;
            for (int v = 0; v < n; ++v)
                if (!done[v] && row[v] < best) {
                    best = row[v];
                    u = v;
                }
            if (u < 0) break;
            done[u] = 1;
            for (int v = 0; v < n; ++v) {
                if (done[v]) continue;
                double hop = s.dist(u, v);
                if (hop > hop_cut) continue;
                double nd = row[u] + hop;
                if (nd < row[v]) row[v] = nd;
            }
        }
        for (int v = 0; v < n; ++v)
            if (row[v] == kInf) fail[0] = 1;
    });
    if (fail[0]) throw ChainUnreachable("some pair admits no b-chain");
    return FiniteSpace(n, std::move(out), s.measures(), s.labels());
}

QuasiGeodesicReport quasi_geodesic_check(const FiniteSpace& s, double b, double gamma) {
    if (!(b > 0.0)) throw InvalidSpace("b must be positive");
    if (!(gamma >= 1.0)) throw InvalidSpace("gamma must be >= 1");
    int n = s.n();
    double hop_cut = b + kRelTol * std::max(1.0, b);
    std::vector<int> hops(static_cast<std::size_t>(n) * n, -1);
    parallel_for(n, [&](int src) {
        int* row = &hops[static_cast<std::size_t>(src) * n];
        std::vector<int> q;
        q.reserve(n);
        row[src] = 0;
        q.push_back(src);
        for (std::size_t head = 0; head < q.size(); ++head) {
            int u = q[head];
            for (int v = 0; v < n; ++v) {
                if (row[v] >= 0 || s.dist(u, v) > hop_cut) continue;
                row[v] = row[u] + 1;
                q.push_back(v);
            }
        }
    });
    QuasiGeodesicReport rep;
    double worst_excess = -kInf;
    for (int x = 0; x < n; ++x)
        for (int y = x + 1; y < n; ++y) {
            int h = hops[static_cast<std::size_t>(x) * n + y];
            double allowed = gamma * s.dist(x, y);
            double needed = h < 0 ? kInf : static_cast<double>(h);
            double excess = needed - allowed;
            if (excess > worst_excess) {
                worst_excess = excess;
                rep.worst_x = x;
                rep.worst_y = y;
                rep.hops_needed = needed;
                rep.hops_allowed = allowed;
            }
        }
    rep.ok = worst_excess <= kRelTol || n == 1;
    return rep;
}

} // namespace coarse
