#include "coarse/generators.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <tuple>

#include "coarse/errors.hpp"

namespace coarse {

namespace {

Graph make_path(long n) {
    if (n < 1) throw InvalidSpec("path needs n >= 1");
    Graph g;
    g.n = static_cast<int>(n);
    for (long i = 0; i + 1 < n; ++i)
        g.edges.push_back({static_cast<int>(i), static_cast<int>(i + 1), 1.0});
    return g;
}

Graph make_cycle(long n) {
    if (n < 3) throw InvalidSpec("cycle needs n >= 3");
    Graph g;
    g.n = static_cast<int>(n);
    for (long i = 0; i < n; ++i)
        g.edges.push_back({static_cast<int>(i), static_cast<int>((i + 1) % n), 1.0});
    return g;
}

Graph make_grid(long a, long b) {
    if (a < 1 || b < 1) throw InvalidSpec("grid needs positive sides");
    Graph g;
    g.n = static_cast<int>(a * b);
    auto id = [b](long i, long j) { return static_cast<int>(i * b + j); };
    for (long i = 0; i < a; ++i)
        for (long j = 0; j < b; ++j) {
            if (j + 1 < b) g.edges.push_back({id(i, j), id(i, j + 1), 1.0});
            if (i + 1 < a) g.edges.push_back({id(i, j), id(i + 1, j), 1.0});
        }
    return g;
}

Graph make_binary_tree(long depth) {
    if (depth < 0) throw InvalidSpec("binary_tree needs depth >= 0");
    if (depth > 20) throw InvalidSpec("binary_tree depth too large");
    long n = (1L << (depth + 1)) - 1;
    Graph g;
    g.n = static_cast<int>(n);
    for (long i = 0; i < n; ++i) {
        if (2 * i + 1 < n) g.edges.push_back({static_cast<int>(i), static_cast<int>(2 * i + 1), 1.0});
        if (2 * i + 2 < n) g.edges.push_back({static_cast<int>(i), static_cast<int>(2 * i + 2), 1.0});
    }
    return g;
}

Graph make_laakso(long level) {
    if (level < 0 || level > 6) throw InvalidSpec("laakso level must be in 0..6");
    struct Arc {
        int u, v;
    };
    int n = 2;
    std::vector<Arc> arcs = {{0, 1}};
    for (long l = 0; l < level; ++l) {
        std::vector<Arc> next;
        next.reserve(arcs.size() * 6);
        for (const Arc& a : arcs) {
            int p1 = n++, pa = n++, pb = n++, p3 = n++;
            next.push_back({a.u, p1});
            next.push_back({p1, pa});
            next.push_back({pa, p3});
            next.push_back({p1, pb});
            next.push_back({pb, p3});
            next.push_back({p3, a.v});
        }
        arcs = std::move(next);
    }
    Graph g;
    g.n = n;
    g.edges.reserve(arcs.size());
    for (const Arc& a : arcs) g.edges.push_back({a.u, a.v, 1.0});
    return g;
}

// Fisher-Yates with explicit rejection sampling so results do not depend on
// the standard library's shuffle implementation.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t k) {
    std::uint64_t lim = std::numeric_limits<std::uint64_t>::max() - (std::numeric_limits<std::uint64_t>::max() % k);
    std::uint64_t r;
    do {
        r = rng();
    } while (r >= lim);
    return r % k;
}

bool connected(int n, const std::vector<Graph::Edge>& edges) {
    std::vector<std::vector<int>> adj(n);
    for (const auto& e : edges) {
        adj[e.u].push_back(e.v);
        adj[e.v].push_back(e.u);
    }
    std::vector<char> seen(n, 0);
    std::vector<int> stack = {0};
    seen[0] = 1;
    int cnt = 1;
    while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        for (int v : adj[u])
            if (!seen[v]) {
                seen[v] = 1;
                ++cnt;
                stack.push_back(v);
            }
    }
    return cnt == n;
}

Graph make_random_regular(long n, long deg, std::uint64_t seed) {
    if (deg < 3) throw InvalidSpec("random_regular needs degree >= 3");
    if (n <= deg) throw InvalidSpec("random_regular needs n > degree");
    if ((n * deg) % 2 != 0) throw InvalidSpec("random_regular needs n*degree even");
    std::mt19937_64 rng(seed);
    for (int attempt = 0; attempt < 10000; ++attempt) {
        std::vector<int> stubs;
        stubs.reserve(n * deg);
        for (long v = 0; v < n; ++v)
            for (long d = 0; d < deg; ++d) stubs.push_back(static_cast<int>(v));
        for (std::size_t i = stubs.size() - 1; i > 0; --i)
            std::swap(stubs[i], stubs[bounded(rng, i + 1)]);
        std::set<std::pair<int, int>> seen;
        bool ok = true;
        for (std::size_t i = 0; i < stubs.size(); i += 2) {
            int u = stubs[i], v = stubs[i + 1];
            if (u == v) {
                ok = false;
                break;
            }
            auto key = std::minmax(u, v);
            if (!seen.insert({key.first, key.second}).second) {
                ok = false;
                break;
            }
        }
        if (!ok) continue;
        Graph g;
        g.n = static_cast<int>(n);
        for (const auto& [u, v] : seen) g.edges.push_back({u, v, 1.0});
        if (connected(g.n, g.edges)) return g;
    }
    throw InvalidSpec("pairing model failed to produce a simple connected graph");
}

Graph make_heisenberg_ball(long radius) {
    if (radius < 0) throw InvalidSpec("heisenberg_ball needs radius >= 0");
    if (radius > 24) throw InvalidSpec("heisenberg_ball radius too large");
    using Elt = std::tuple<long, long, long>;
    // right multiplication by generators a^(+-1), b^(+-1)
    auto step = [](const Elt& g, int dir) -> Elt {
        auto [x, y, z] = g;
        switch (dir) {
            case 0: return {x + 1, y, z};
            case 1: return {x - 1, y, z};
            case 2: return {x, y + 1, z + x};
            default: return {x, y - 1, z - x};
        }
    };
    std::map<Elt, int> id;
    std::vector<Elt> order;
    std::vector<int> depth;
    Elt e{0, 0, 0};
    id[e] = 0;
    order.push_back(e);
    depth.push_back(0);
    for (std::size_t head = 0; head < order.size(); ++head) {
        if (depth[head] == radius) continue;
        for (int dir = 0; dir < 4; ++dir) {
            Elt ng = step(order[head], dir);
            if (id.emplace(ng, static_cast<int>(order.size())).second) {
                order.push_back(ng);
                depth.push_back(depth[head] + 1);
            }
        }
    }
    Graph g;
    g.n = static_cast<int>(order.size());
    std::set<std::pair<int, int>> edges;
    for (int u = 0; u < g.n; ++u)
        for (int dir = 0; dir < 4; ++dir) {
            auto it = id.find(step(order[u], dir));
            if (it != id.end()) {
                auto key = std::minmax(u, it->second);
                edges.insert({key.first, key.second});
            }
        }
    for (const auto& [u, v] : edges) g.edges.push_back({u, v, 1.0});
    return g;
}

} // namespace

GenSpec GenSpec::parse(const std::string& text) {
    auto colon = text.find(':');
    std::string name = text.substr(0, colon);
    GenSpec spec;
    if (name == "path") spec.kind = GenKind::path;
    else if (name == "cycle") spec.kind = GenKind::cycle;
    else if (name == "grid") spec.kind = GenKind::grid;
    else if (name == "binary_tree") spec.kind = GenKind::binary_tree;
    else if (name == "laakso") spec.kind = GenKind::laakso;
    else if (name == "random_regular") spec.kind = GenKind::random_regular;
    else if (name == "heisenberg_ball") spec.kind = GenKind::heisenberg_ball;
    else throw InvalidSpec("unknown generator kind: " + name);

    if (colon != std::string::npos) {
        std::stringstream ss(text.substr(colon + 1));
        std::string item;
        while (std::getline(ss, item, ',')) {
            if (item.rfind("seed=", 0) == 0)
                spec.seed = std::stoull(item.substr(5));
            else
                spec.params.push_back(std::stol(item));
        }
    }
    return spec;
}

std::string GenSpec::to_string() const {
    const char* names[] = {"path", "cycle", "grid", "binary_tree",
                           "laakso", "random_regular", "heisenberg_ball"};
    std::string s = names[static_cast<int>(kind)];
    for (std::size_t i = 0; i < params.size(); ++i)
        s += (i ? "," : ":") + std::to_string(params[i]);
    if (kind == GenKind::random_regular) s += ",seed=" + std::to_string(seed);
    return s;
}

Graph gen(const GenSpec& spec) {
    auto need = [&](std::size_t k) {
        if (spec.params.size() != k) throw InvalidSpec("wrong parameter count");
    };
    switch (spec.kind) {
        case GenKind::path: need(1); return make_path(spec.params[0]);
        case GenKind::cycle: need(1); return make_cycle(spec.params[0]);
        case GenKind::grid: need(2); return make_grid(spec.params[0], spec.params[1]);
        case GenKind::binary_tree: need(1); return make_binary_tree(spec.params[0]);
        case GenKind::laakso: need(1); return make_laakso(spec.params[0]);
        case GenKind::random_regular: need(2);
            return make_random_regular(spec.params[0], spec.params[1], spec.seed);
        case GenKind::heisenberg_ball: need(1); return make_heisenberg_ball(spec.params[0]);
    }
    throw InvalidSpec("unreachable");
}

long laakso_edge_count(int level) {
    long e = 1;
    for (int i = 0; i < level; ++i) e *= 6;
    return e;
}

long laakso_vertex_count(int level) {
    // V_{l+1} = V_l + 4 E_l starting from a single edge
    long v = 2, e = 1;
    for (int i = 0; i < level; ++i) {
        v += 4 * e;
        e *= 6;
    }
    return v;
}

std::vector<std::vector<int>> automorphisms(const FiniteSpace& s, int limit) {
    int n = s.n();
    if (n > limit) throw TooLarge("automorphism search limited to n <= " + std::to_string(limit));

    // per-vertex invariant: measure plus sorted distance row
    std::vector<std::vector<double>> profile(n);
    for (int v = 0; v < n; ++v) {
        auto& p = profile[v];
        p.reserve(n + 1);
        p.push_back(s.measure(v));
        for (int w = 0; w < n; ++w) p.push_back(s.dist(v, w));
        std::sort(p.begin() + 1, p.end());
    }
    auto compatible = [&](int a, int b) {
        for (std::size_t i = 0; i < profile[a].size(); ++i)
            if (std::fabs(profile[a][i] - profile[b][i]) > 1e-9) return false;
        return true;
    };

    std::vector<std::vector<int>> found;
    std::vector<int> perm(n, -1);
    std::vector<char> used(n, 0);
    std::function<void(int)> rec = [&](int v) {
        if (v == n) {
            found.push_back(perm);
            return;
        }
        for (int img = 0; img < n; ++img) {
            if (used[img] || !compatible(v, img)) continue;
            bool ok = true;
            for (int w = 0; w < v && ok; ++w)
                if (std::fabs(s.dist(v, w) - s.dist(img, perm[w])) > 1e-9) ok = false;
            if (!ok) continue;
            perm[v] = img;
            used[img] = 1;
            rec(v + 1);
            used[img] = 0;
            perm[v] = -1;
        }
    };
    rec(0);
    return found;
}

} // namespace coarse
