#pragma once
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace coarse {

// Sparse nonnegative function on points, entries sorted by point index.
struct SparseVec {
    std::vector<int> idx;
    std::vector<double> val;

    std::size_t size() const { return idx.size(); }
    bool empty() const { return idx.empty(); }

    void push(int i, double v) {
        idx.push_back(i);
        val.push_back(v);
    }

    void scale(double s) {
        for (auto& v : val) v *= s;
    }

    void pow_inplace(double e) {
        for (auto& v : val) v = std::pow(v, e);
    }

    double value_at(int i) const {
        auto it = std::lower_bound(idx.begin(), idx.end(), i);
        if (it == idx.end() || *it != i) return 0.0;
        return val[static_cast<std::size_t>(it - idx.begin())];
    }
};

inline double pow_abs(double x, double p) {
    double a = std::fabs(x);
    if (p == 1.0) return a;
    if (p == 2.0) return a * a;
    return std::pow(a, p);
}

// sum_y |a(y)-b(y)|^p * mu(y), accumulated in ascending order of the terms.
// Sorting makes the sum independent of index order, so values agree bitwise
// across point relabelings (automorphism images sum the same multiset).
inline double lp_diff_pow(const SparseVec& a, const SparseVec& b, double p,
                          const std::vector<double>& mu,
                          std::vector<double>& buffer) {
    buffer.clear();
    std::size_t i = 0, j = 0;
    while (i < a.size() || j < b.size()) {
        double d;
        if (j == b.size() || (i < a.size() && a.idx[i] < b.idx[j])) {
            d = pow_abs(a.val[i], p) * mu[a.idx[i]];
            ++i;
        } else if (i == a.size() || b.idx[j] < a.idx[i]) {
            d = pow_abs(b.val[j], p) * mu[b.idx[j]];
            ++j;
        } else {
            d = pow_abs(a.val[i] - b.val[j], p) * mu[a.idx[i]];
            ++i;
            ++j;
        }
        if (d != 0.0) buffer.push_back(d);
    }
    std::sort(buffer.begin(), buffer.end());
    double s = 0.0;
    for (double d : buffer) s += d;
    return s;
}

inline double lp_norm_pow(const SparseVec& a, double p, const std::vector<double>& mu,
                          std::vector<double>& buffer) {
    buffer.clear();
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = pow_abs(a.val[i], p) * mu[a.idx[i]];
        if (d != 0.0) buffer.push_back(d);
    }
    std::sort(buffer.begin(), buffer.end());
    double s = 0.0;
    for (double d : buffer) s += d;
    return s;
}

} // namespace coarse
