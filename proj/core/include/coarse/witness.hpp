#pragma once
#include <memory>
#include <string>
#include <vector>

#include "coarse/space.hpp"
#include "coarse/sparse_vec.hpp"

namespace coarse {

// Per-scale, per-point ball-supported functions psi_{n,x} together with the
// exponent p of the ambient L^p(X, mu). Immutable after construction.
struct WitnessFamily {
    double p = 1.0;
    std::vector<int> scales;                  // increasing integers n
    std::vector<std::vector<SparseVec>> psi;  // [scale index][point]
    std::shared_ptr<const FiniteSpace> space;
    std::vector<std::string> warnings;

    int scale_index(int n) const; // -1 when absent
    const SparseVec& at(int scale_n, int x) const;
};

struct AProfile {
    struct Sample {
        int n;
        double J;         // min_x ||psi_{n,x}||_p
        double lipschitz; // max pair ratio ||psi_{n,x}-psi_{n,y}||_p / d(x,y)
        bool saturated;   // n > Diam/2, boundary effects dominate
    };
    std::vector<Sample> samples;

    double J_at(int n) const;
    double lipschitz_at(int n) const;
};

// psi_{n,x} = (1/n) sum_{k=1..n} 1_{B(x,k)} / V(x,k); probability densities, p = 1.
WitnessFamily subexp_family(std::shared_ptr<const FiniteSpace> s,
                            const std::vector<int>& scales);

// psi_{n,x} = v(q_n)^{-1/p} sum_{k=1..q_n-1} 1_{B(x,k)} with
// k(m) = sup{k : v(m-k) >= v(m)/2}, j(n) = max_{1<=j<=n} k(j), q_n realizing j(n);
// v is the measured lower volume function vmin on the integer radius grid.
// Throws DegenerateProfile when v is constant over all radii.
WitnessFamily uniform_volume_family(std::shared_ptr<const FiniteSpace> s, double p,
                                    const std::vector<int>& scales);

// psi_{n,x} = sum_{k=[n/2]..n} v(k)^{-1/p} 1_{B(x,k)}, v = vmin. Emits a warning
// (not an error) when the space's uniformity ratio exceeds 8.
WitnessFamily doubling_family(std::shared_ptr<const FiniteSpace> s, double p,
                              const std::vector<int>& scales);

// Measures J(n) = min_x ||psi_{n,x}||_p exactly, the Lipschitz constant per scale,
// and saturation flags. Verifies support(psi_{n,x}) in B(x,n); throws
// SupportViolation otherwise.
AProfile measure_profile(const WitnessFamily& f);

struct NormalizeResult {
    WitnessFamily family; // exactly 1-Lipschitz per scale
    AProfile profile;     // post-normalization J, pre-normalization lipschitz
};

// Divides psi_{n,.} by L_n = max over pairs of ||psi_{n,x}-psi_{n,y}||_p / d(x,y).
// For spaces with geodesic edge evidence the maximum is taken over tight edges
// (equal to the all-pairs maximum on path metrics); all pairs otherwise.
NormalizeResult normalize(const WitnessFamily& f);

// Pointwise power map psi -> psi^(p/q), q >= p. Norms map as
// ||psi'||_q = ||psi||_p^(p/q); re-normalized only if the measured L^q
// Lipschitz constant exceeds 1.
WitnessFamily p_convert(const WitnessFamily& f, double q);

// Transfers a family on the net X into the ambient space Y along a retraction
// with displacement <= c: psi'_{n+ceil(c), y} = psi_{n, retraction[y]} viewed on Y.
// `inclusion[i]` is the Y-index of X's point i; X must carry Y's induced metric.
WitnessFamily net_transfer(const WitnessFamily& f,
                           std::shared_ptr<const FiniteSpace> ambient,
                           const std::vector<int>& inclusion,
                           const std::vector<int>& retraction, double c);

struct L1BoundReport {
    struct PerScale {
        int n;
        double bound;      // (2 h C_h / n) log(vmax(n+h)/vmin(1))
        double max_lhs;    // worst pair difference norm
        double max_slack;  // max over pairs of lhs - bound; <= 0 means pass
        int worst_x = -1, worst_y = -1;
    };
    double C_h = 1.0;
    std::vector<PerScale> scales;
    bool pass = true;
};

// Checks ||psi_{n,x}-psi_{n,y}||_1 <= (2hC_h/n) log(V_max(n+h)/V_min(1)) for all
// pairs with d(x,y) <= h, where C_h = max_{x, 1<=r<=Diam} V(x,r+h)/V(x,r).
L1BoundReport subexp_l1_bound_check(const WitnessFamily& f, int h);

} // namespace coarse
