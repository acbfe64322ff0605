#include "coarse/oracle.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "coarse/errors.hpp"

namespace coarse {

namespace {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

struct Feasibility {
    Mat lo, hi;  // squared-distance box
    Mat J;       // centering projector
    double scale;

    Mat clamp(const Mat& S) const {
        Mat out = S.cwiseMax(lo).cwiseMin(hi);
        out.diagonal().setZero();
        return 0.5 * (out + out.transpose());
    }
    // projection onto {S : J S J <= 0}: drop positive eigenpart of the centered part
    Mat cone(const Mat& S) const {
        Mat M = J * S * J;
        Eigen::SelfAdjointEigenSolver<Mat> es(M);
        Vec ew = es.eigenvalues().cwiseMin(0.0);
        Mat Mneg = es.eigenvectors() * ew.asDiagonal() * es.eigenvectors().transpose();
        return S - M + Mneg;
    }
    double box_residual(const Mat& S) const {
        double r = 0.0;
        for (int i = 0; i < S.rows(); ++i)
            for (int j = 0; j < S.cols(); ++j) {
                if (i == j) continue;
                r = std::max(r, std::max(lo(i, j) - S(i, j), S(i, j) - hi(i, j)));
            }
        return r / scale;
    }
};

bool dr_probe(Feasibility& fz, int iters, double residual, Mat& X) {
    for (int it = 0; it < iters; ++it) {
        Mat A = fz.cone(X);
        if (fz.box_residual(A) < residual) return true;
        Mat B = fz.clamp(2.0 * A - X);
        X = X + B - A;
    }
    return false;
}

} // namespace

DistortionBracket exact_c2(const FiniteSpace& s, double tol, int iter_budget,
                           double residual, double upper_hint) {
    int n = s.n();
    if (n > 64) throw TooLarge("exact_c2 is limited to n <= 64");
    if (!(tol >= 1e-6)) throw InvalidSpace("tol must be >= 1e-6");
    if (n == 1) return {1.0, 1.0, "trivial"};

    Feasibility fz;
    fz.lo.resize(n, n);
    fz.J = Mat::Identity(n, n) - Mat::Constant(n, n, 1.0 / n);
    fz.scale = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double d2 = s.dist(i, j) * s.dist(i, j);
            fz.lo(i, j) = d2;
            fz.scale = std::max(fz.scale, d2);
        }

    auto probe = [&](double T, Mat& X) {
        fz.hi = fz.lo * (T * T);
        return dr_probe(fz, iter_budget, residual, X);
    };

    double lo_t = 1.0;
    double hi_t = upper_hint > 1.0 ? upper_hint : static_cast<double>(n);
    Mat X = fz.lo * (1.0 + hi_t * hi_t) / 2.0;
    Mat Xfeas = X;
    int widen = 0;
    while (!probe(hi_t, X)) {
        hi_t *= 2.0;
        if (++widen > 8) throw BudgetExceeded("no feasible upper bracket found");
    }
    Xfeas = X;
    while (hi_t - lo_t > tol) {
        double mid = 0.5 * (lo_t + hi_t);
        Mat Xm = Xfeas; // warm start from the last feasible point
        if (probe(mid, Xm)) {
            hi_t = mid;
            Xfeas = Xm;
        } else {
            lo_t = mid;
        }
    }
    return {lo_t, hi_t, "dr_bisection"};
}

namespace {

double config_distortion(const Mat& Y, const FiniteSpace& s, double p) {
    int n = s.n();
    double ex = 0.0, co = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            double d = s.dist(i, j);
            if (d <= 0.0) continue;
            double e = 0.0;
            for (int k = 0; k < Y.cols(); ++k)
                e += std::pow(std::fabs(Y(i, k) - Y(j, k)), p);
            e = std::pow(e, 1.0 / p);
            if (e <= 1e-15) return std::numeric_limits<double>::infinity();
            ex = std::max(ex, e / d);
            co = std::max(co, d / e);
        }
    return ex * co;
}

Mat mds_init(const FiniteSpace& s, int dim) {
    int n = s.n();
    Mat D2(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) D2(i, j) = s.dist(i, j) * s.dist(i, j);
    Mat J = Mat::Identity(n, n) - Mat::Constant(n, n, 1.0 / n);
    Mat G = -0.5 * J * D2 * J;
    Eigen::SelfAdjointEigenSolver<Mat> es(G);
    Mat Y = Mat::Zero(n, dim);
    int take = std::min(dim, n);
    for (int k = 0; k < take; ++k) {
        int idx = n - 1 - k;
        double lam = std::max(es.eigenvalues()[idx], 0.0);
        Y.col(k) = es.eigenvectors().col(idx) * std::sqrt(lam);
    }
    return Y;
}

} // namespace

double numeric_cp_upper(const FiniteSpace& s, double p, int dim, int restarts,
                        std::uint64_t seed) {
    if (!(p >= 1.0)) throw BadExponent("p must be >= 1");
    if (dim < 1) throw InvalidSpace("dim must be >= 1");
    int n = s.n();
    if (n == 1) return 1.0;

    struct Pair {
        int i, j;
        double d;
    };
    std::vector<Pair> pairs;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (s.dist(i, j) > 0.0) pairs.push_back({i, j, s.dist(i, j)});

    double best = std::numeric_limits<double>::infinity();
    Mat base = mds_init(s, dim);
    for (int rs = 0; rs < std::max(1, restarts); ++rs) {
        Mat Y = base;
        std::mt19937_64 rng(seed + static_cast<std::uint64_t>(rs) * 0x9e3779b97f4a7c15ull);
        if (rs > 0) {
            std::normal_distribution<double> gauss(0.0, 1.0);
            double sigma = 0.2 * s.diameter() * rs / std::max(1, restarts);
            for (int i = 0; i < n; ++i)
                for (int k = 0; k < dim; ++k) Y(i, k) += sigma * gauss(rng);
        }
        best = std::min(best, config_distortion(Y, s, p));

        Mat m1 = Mat::Zero(n, dim), m2 = Mat::Zero(n, dim);
        int step_count = 0;
        for (double beta : {4.0, 16.0, 64.0}) {
            for (int it = 0; it < 250; ++it) {
                // u = log(|Yi-Yj|_p / d); objective = LSE(beta u)/beta + LSE(-beta u)/beta
                std::vector<double> u(pairs.size());
                std::vector<Vec> diffs(pairs.size());
                double umax = -1e30, umin = 1e30;
                for (std::size_t q = 0; q < pairs.size(); ++q) {
                    const auto& pr = pairs[q];
                    Vec dv = (Y.row(pr.i) - Y.row(pr.j)).transpose();
                    double e = 0.0;
                    for (int k = 0; k < dim; ++k) e += std::pow(std::fabs(dv[k]), p);
                    e = std::pow(std::max(e, 1e-30), 1.0 / p);
                    u[q] = std::log(e / pr.d);
                    diffs[q] = dv;
                    umax = std::max(umax, u[q]);
                    umin = std::min(umin, u[q]);
                }
                double zplus = 0.0, zminus = 0.0;
                for (double uv : u) {
                    zplus += std::exp(beta * (uv - umax));
                    zminus += std::exp(-beta * (uv - umin));
                }
                Mat grad = Mat::Zero(n, dim);
                for (std::size_t q = 0; q < pairs.size(); ++q) {
                    double wplus = std::exp(beta * (u[q] - umax)) / zplus;
                    double wminus = std::exp(-beta * (u[q] - umin)) / zminus;
                    double coeff = wplus - wminus; // d(obj)/d(u_q)
                    if (coeff == 0.0) continue;
                    const auto& pr = pairs[q];
                    Vec dv = diffs[q];
                    double e_pow = 0.0;
                    for (int k = 0; k < dim; ++k) e_pow += std::pow(std::fabs(dv[k]), p);
                    e_pow = std::max(e_pow, 1e-30);
                    for (int k = 0; k < dim; ++k) {
                        double g = std::pow(std::fabs(dv[k]), p - 1.0) *
                                   (dv[k] >= 0 ? 1.0 : -1.0) / e_pow;
                        grad(pr.i, k) += coeff * g;
                        grad(pr.j, k) -= coeff * g;
                    }
                }
                // Adam
                ++step_count;
                double lr = 0.05 * s.diameter();
                m1 = 0.9 * m1 + 0.1 * grad;
                m2 = 0.999 * m2 + 0.001 * grad.cwiseProduct(grad);
                double c1 = 1.0 - std::pow(0.9, step_count);
                double c2 = 1.0 - std::pow(0.999, step_count);
                for (int i = 0; i < n; ++i)
                    for (int k = 0; k < dim; ++k)
                        Y(i, k) -= lr * (m1(i, k) / c1) /
                                   (std::sqrt(m2(i, k) / c2) + 1e-9);
            }
            best = std::min(best, config_distortion(Y, s, p));
        }
    }
    return best;
}

} // namespace coarse
