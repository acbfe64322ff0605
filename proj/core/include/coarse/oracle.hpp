#pragma once
#include <cstdint>
#include <string>

#include "coarse/space.hpp"

namespace coarse {

struct DistortionBracket {
    double lower = 1.0;
    double upper = 1.0;
    std::string method;
};

// Exact least Hilbert distortion by bisection on T: feasibility of
//   { S symmetric, d^2 <= S_xy <= T^2 d^2, -J S J / 2 PSD }
// decided by reflect-project (Douglas-Rachford) alternating projections between
// the negative-type cone (eigenvalue clipping of the doubly centered part) and
// the box. A probe is feasible when the relative box residual of the cone
// iterate drops below `residual` within `iter_budget` iterations.
// Requires n <= 64. upper_hint, when > 1, replaces n as the initial bracket top.
DistortionBracket exact_c2(const FiniteSpace& s, double tol, int iter_budget = 5000,
                           double residual = 1e-8, double upper_hint = 0.0);

// Upper bound on c_p from direct optimization of an n-point configuration in
// l_p^dim: classical MDS start plus seeded random restarts, Adam steps on a
// log-sum-exp smoothing of log(expansion) + log(contraction) with sharpening
// temperature, exact distortion of the best configuration reported.
double numeric_cp_upper(const FiniteSpace& s, double p, int dim, int restarts,
                        std::uint64_t seed);

} // namespace coarse
