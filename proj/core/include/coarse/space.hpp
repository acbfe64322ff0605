#pragma once
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace coarse {

struct Graph {
    struct Edge {
        int u, v;
        double length;
    };
    int n = 0;
    std::vector<Edge> edges;
};

// Finite metric measure space (X, d, mu): dense symmetric distance matrix plus a
// positive vertex measure. Immutable after construction; all operations are pure.
// Sizes are capped at n <= 20000 (dense O(n^2) storage is the documented policy).
class FiniteSpace {
public:
    static constexpr int kMaxPoints = 20000;

    // Validates symmetry, zero diagonal, positive measure and (for n <= 512
    // exhaustively, sampled above) the triangle inequality at 1e-9 relative.
    FiniteSpace(int n, std::vector<double> dist_rowmajor,
                std::vector<double> measure = {},
                std::vector<std::string> labels = {});

    int n() const { return n_; }
    double dist(int i, int j) const { return dist_[static_cast<std::size_t>(i) * n_ + j]; }
    double measure(int i) const { return measure_[i]; }
    const std::vector<double>& measures() const { return measure_; }
    const std::vector<double>& dist_data() const { return dist_; }
    const std::vector<std::string>& labels() const { return labels_; }

    // Edge list of the generating graph when the metric came from from_graph;
    // used as geodesic evidence for the edges-only Lipschitz fast path.
    const std::optional<std::vector<Graph::Edge>>& geodesic_edges() const { return edges_; }

    double diameter() const;
    double min_positive_distance() const;
    // Sorted distinct positive distance values (1e-9 relative dedup).
    std::vector<double> distance_grid() const;
    double total_mass() const;

    // Row of distances from x sorted ascending together with measure prefix sums;
    // volume(x, r) queries are O(log n) against this.
    struct VolumeTable {
        std::vector<double> sorted_dist; // per point, ascending
        std::vector<double> mass_prefix; // cumulative measure in that order
    };
    const VolumeTable& volume_table(int x) const { return vt_[x]; }

    friend FiniteSpace from_graph(const Graph& g, std::vector<double> measure);

private:
    int n_;
    std::vector<double> dist_;
    std::vector<double> measure_;
    std::vector<std::string> labels_;
    std::optional<std::vector<Graph::Edge>> edges_;
    std::vector<VolumeTable> vt_;
    void build_volume_tables();
};

// Shortest-path metric of a connected graph; unit measure unless supplied.
FiniteSpace from_graph(const Graph& g, std::vector<double> measure = {});

// Closed ball { y : d(x,y) <= r }, ascending point indices.
std::vector<int> ball(const FiniteSpace& s, int x, double r);

// V(x,r) = sum of measure over the closed ball.
double volume(const FiniteSpace& s, int x, double r);

struct GrowthProfile {
    std::vector<double> radii;
    std::vector<double> vmin, vmax;
    std::vector<double> uniformity; // vmax / vmin
};

GrowthProfile growth_profile(const FiniteSpace& s, const std::vector<double>& radii);

// max over points and sampled radii of V(x,2r)/V(x,r).
double doubling_constant(const FiniteSpace& s, const std::vector<double>& radii);

// d_b(x,y): infimum of chain lengths with hops <= b. Throws ChainUnreachable
// if some pair admits no b-chain. Result dominates d pointwise.
FiniteSpace b_geodesic_metric(const FiniteSpace& s, double b);

struct QuasiGeodesicReport {
    bool ok = true;
    int worst_x = -1, worst_y = -1;
    double hops_needed = 0;  // infinite encoded as -1 hops? use huge value
    double hops_allowed = 0;
};

// Checks every pair admits a chain with hops <= b and hop count <= gamma*d(x,y).
QuasiGeodesicReport quasi_geodesic_check(const FiniteSpace& s, double b, double gamma);

} // namespace coarse
