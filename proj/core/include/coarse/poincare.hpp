#pragma once
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "coarse/space.hpp"

namespace coarse {

struct PairMeasure {
    std::vector<std::pair<int, int>> pairs;
    std::vector<double> w;

    void validate(int npoints) const; // weights >= 0 summing to 1 within 1e-12
    static PairMeasure uniform(std::vector<std::pair<int, int>> pairs);
};

// P lives on E_r = {d >= r}, Q on distinct pairs (E_1 for cumulative certificates).
struct MeasurePair {
    double r = 1.0;
    PairMeasure P, Q;
};

enum class CertMethod { eigen_exact, heuristic_lower, cut_exhaustive, skew_cube };

const char* method_name(CertMethod m);

struct PoincareCertificate {
    double p = 2.0;
    double r = 1.0;
    double J = 1.0;
    MeasurePair pair;
    CertMethod method = CertMethod::heuristic_lower;
};

struct CumulativeCertificate {
    double p = 2.0;
    double r = 1.0;
    std::vector<int> scale_ks;           // scales 2^k
    std::vector<PairMeasure> P;          // per scale, on E_{2^k}
    PairMeasure Q;                       // on E_1
    std::vector<double> J;               // certified J(2^k) (valid as a CP constant)
    std::vector<double> J_scale_opt;     // per-scale optimal constants, diagnostic
    double fitted_c = 0.0;               // J(t) ~ c t when the linear ansatz was used
    CertMethod method = CertMethod::eigen_exact;
};

// Exact optimal constant at p = 2: J = sqrt(lambda_max) of the pencil
// A(phi) = sum_P w (phi_x - phi_y)^2 against B(phi) = sum_Q w (phi_x-phi_y)^2 / d^2,
// maximized outside ker B. Throws Infeasible when some phi has B = 0 < A.
PoincareCertificate optimal_constant_p2(const FiniteSpace& s, MeasurePair mp);

// Lower bound on the optimal constant for general p: multi-start projected
// gradient ascent on the Rayleigh-type ratio, plus exhaustive 0/1 cut search
// when n <= 20. method records cut_exhaustive only when the cut search matches
// the ascent value to 1e-6.
PoincareCertificate optimal_constant_general(const FiniteSpace& s, MeasurePair mp,
                                             double p, int budget = 2000,
                                             std::uint64_t seed = 1);

// P = uniform over far pairs (largest r with |E_r| at least half of all ordered
// pairs), Q = uniform over unit-distance pairs; exact eigen constant.
PoincareCertificate expander_certificate(const FiniteSpace& s);

// Skew-cube certificate from a combinatorial cube image: corner c of {0,1}^m maps
// to point cube[c]. J(L) = l sqrt(m) with l = max edge image distance and
// L = min diagonal image distance.
PoincareCertificate skew_cube_certificate(const FiniteSpace& s,
                                          const std::vector<int>& cube);

// Cumulative certificate for the canonical binary tree (gen binary_tree:D layout).
// P_k charges sibling-subtree pairs at distance in [2^k, 2^(k+1)) grouped by fork
// depth, Q charges edges by depth; class weights are tuned by projected subgradient
// descent on the certified constant and the final constant is an exact eigensolve
// of the linear-ansatz J(t) = c t (p = 2). For p != 2 the constant comes from the
// ascent heuristic and the certificate is marked heuristic_lower.
CumulativeCertificate tree_cp_certificate(const FiniteSpace& s, double p);

// Laakso-graph cumulative certificate: P_k uniform over all pairs at distance in
// [2^k, 2^(k+1)), Q uniform over edges, per-scale exact eigen constants made into
// a valid CP certificate by the m^(1/p) aggregation factor.
CumulativeCertificate laakso_cp_check(int level, double p = 2.0);

struct ConstraintReport {
    std::vector<double> t;
    std::vector<double> ceiling; // compression ceiling at t
    double c_p_lower = 1.0;
    bool certified = false;      // advisory only when the method is heuristic
    double q = 2.0;              // exponent used in the cumulative rho-constraint
    bool q_mismatch = false;     // q != p case is flagged, per the source inequality
    std::string note;
};

// Ceiling rho_F(t) <= J(r) for t <= r and the bound c_p >= r/J(r). Refuses p <= 1.
ConstraintReport compression_constraint(const PoincareCertificate& cert);

// Dyadic-sum constraint sum_k (rho(2^k)/J(2^k))^q <= 1 with q = max(2,p) and the
// bound c_p >= (sum_k (2^k/J(2^k))^p)^(min(1/p,1/2)). Refuses p <= 1.
ConstraintReport cumulative_constraint(const CumulativeCertificate& cert);

// Certificate file: header "poincare p=<p> r=<r> J=<J> method=<m>", then P / Q
// sections of "x y weight" triples.
void write_certificate(std::ostream& out, const PoincareCertificate& cert);
PoincareCertificate read_certificate(std::istream& in);
void write_certificate(std::ostream& out, const CumulativeCertificate& cert);

} // namespace coarse
