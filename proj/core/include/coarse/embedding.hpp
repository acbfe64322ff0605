#pragma once
#include <memory>
#include <string>
#include <vector>

#include "coarse/rate.hpp"
#include "coarse/witness.hpp"

namespace coarse {

// Dyadic block embedding F(x) = (+)_k F_k(x), F_k(x) = w_k (psi_{2^k,x} - psi_{2^k,o}).
// Pairwise distances are computed from the stored psi blocks directly, so they are
// exactly independent of the base point (the o-terms cancel identically).
struct Embedding {
    double p = 2.0;
    int base = 0;
    std::vector<int> scale_ks;           // exponents k; block k uses scale 2^k
    std::vector<double> weights;         // w_k
    std::vector<double> block_J;         // measured J(2^k) of the source family
    std::vector<std::vector<SparseVec>> psi; // [k index][point]
    std::shared_ptr<const FiniteSpace> space;
    std::vector<std::string> warnings;

    double pair_distance(int x, int y) const;
    // materialized block F_k(x), for dumps
    SparseVec block(std::size_t k_index, int x) const;
};

struct Profile {
    std::vector<double> t;
    std::vector<double> value;
    std::vector<bool> flagged; // theta: grid points where rho or delta vanish
};

struct EmbeddingProfiles {
    Profile rho;    // compression: inf over d(x,y) >= t
    Profile delta;  // dilation:    max over d(x,y) <= t
    Profile theta;  // exp(|log rho/t| + |log delta/t|)
    double fit_a = 0.0, fit_b = 0.0; // least a+b with delta(t) <= a t + b on the grid
};

// Weights w_k = f(2^k)/J(2^k) for k = 0..kmax; the family must be normalized and
// contain every scale 2^k (MissingScale otherwise). A non-summable weight tail
// gets a warning, not an error.
Embedding build_uniform_embedding(const WitnessFamily& fam, const AProfile& profile,
                                  const RateFunction& f, int base, int kmax);

// Weights w_k = 2^k/J(2^k) for k = 0..floor(log2(Diam/2)).
Embedding build_distortion_embedding(const WitnessFamily& fam, const AProfile& profile,
                                     int base);

struct SubsequenceSelection {
    std::vector<int> scale_ks;       // selected exponents
    std::vector<double> guarantees;  // f(2^k) per selected scale
    double budget_used = 0.0;        // sum of (f/J)^p over the selection
};

// Greedy scale selection keeping sum (f(2^k)/J(2^k))^p <= 1.
// Throws NoSubsequence when no scale fits the budget.
SubsequenceSelection subsequence_select(const AProfile& profile, const RateFunction& f,
                                        double p);

Profile compression(const Embedding& e);
Profile dilation(const Embedding& e);
EmbeddingProfiles embedding_profiles(const Embedding& e);

// (max ||F(x)-F(y)||/d) * (max d/||F(x)-F(y)||); Degenerate on collisions.
double distortion(const Embedding& e);

// Least-squares slope of log value vs log t over the top half of the positive grid.
double empirical_rate(const Profile& prof);

struct AuditReport {
    bool pass = true;
    double min_slack = 0.0; // most negative margin observed
    std::string detail;
};

// For every scale k and every pair with d > 2*2^k:
// ||F(x)-F(y)||_p >= 2^(1/p) w_k J(2^k) - 1e-9.
AuditReport disjoint_support_audit(const Embedding& e);

// ||F(x)-F(y)||_p <= d(x,y) (sum_k w_k^p)^(1/p) + 1e-9 (the family is 1-Lipschitz).
AuditReport lipschitz_audit(const Embedding& e);

// The dyadic-sum form of the distortion upper bound, 2 (sum_k (2^k/J(2^k))^p)^(1/p),
// and the trapezoid evaluation of the same integral on the distance grid.
struct DistortionBound {
    double dyadic_sum_form;
    double integral_form;
};
DistortionBound distortion_upper_bound(const Embedding& e);

} // namespace coarse
