#pragma once
#include <vector>

#include "coarse/witness.hpp"

namespace coarse {

// Parametric rate function f(t) = t^a * log(e+t)^(-b), a in [0,1], b >= 0.
// b = +infinity is the zero-rate sentinel: f == 0 on t > 0.
struct RateFunction {
    double a = 0.5;
    double b = 0.0;

    double operator()(double t) const;
    // nondecreasing on the given grid (the admissibility check used by callers)
    bool nondecreasing_on(const std::vector<double>& grid) const;
};

enum class ConditionVerdict { converges, diverges, inconclusive };

struct ConditionReport {
    ConditionVerdict verdict;
    // partial sums of sum_k (f(2^k)/J(2^k))^p over the available scales
    std::vector<double> partial_sums;
};

// Exact classification of the condition  int_1^inf (f/J)^p dt/t < inf  for
// parametric f and J: with exponents (a_f - a_J, b_f - b_J) the integral
// converges iff a_f < a_J, or a_f = a_J and (b_f - b_J) * p > 1.
ConditionReport condition_check(const RateFunction& f, const RateFunction& J, double p);

// Sampled profile: only partial-sum evidence, verdict is inconclusive.
ConditionReport condition_check(const RateFunction& f, const AProfile& J, double p);

} // namespace coarse
