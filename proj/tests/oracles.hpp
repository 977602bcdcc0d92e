// Test-only oracles, kept independent of the library's solver paths.
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <vector>

#include "srfe/combinatorics.hpp"

namespace oracles {

/// Coordinate descent for the lasso min 0.5 ||Ac - y||^2 + lambda ||c||_1.
inline Eigen::VectorXd lasso_cd(const Eigen::MatrixXd& A, const Eigen::VectorXd& y, double lambda,
                                double tol = 1e-13, int max_sweeps = 500000) {
    const Eigen::Index n = A.cols();
    Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd col_sq(n);
    for (Eigen::Index j = 0; j < n; ++j) col_sq(j) = A.col(j).squaredNorm();
    Eigen::VectorXd resid = y;

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double max_delta = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            if (col_sq(j) == 0.0) continue;
            const double old = c(j);
            const double rho = A.col(j).dot(resid) + col_sq(j) * old;
            double next = 0.0;
            if (rho > lambda) next = (rho - lambda) / col_sq(j);
            else if (rho < -lambda) next = (rho + lambda) / col_sq(j);
            if (next != old) {
                resid += A.col(j) * (old - next);
                c(j) = next;
                max_delta = std::max(max_delta, std::abs(next - old));
            }
        }
        if (max_delta < tol) break;
    }
    return c;
}

/// High-precision reference for min ||c||_1 s.t. ||Ac - y|| <= radius, via
/// bisection on the lasso penalty to land on the Pareto curve at the requested
/// residual. Valid for radius between the least-squares residual and ||y||.
inline Eigen::VectorXd bpdn_reference(const Eigen::MatrixXd& A, const Eigen::VectorXd& y,
                                      double radius) {
    if (y.norm() <= radius) return Eigen::VectorXd::Zero(A.cols());
    double lam_lo = 0.0;
    double lam_hi = (A.transpose() * y).lpNorm<Eigen::Infinity>();
    Eigen::VectorXd c;
    for (int it = 0; it < 200; ++it) {
        const double lam = 0.5 * (lam_lo + lam_hi);
        c = lasso_cd(A, y, std::max(lam, 1e-14));
        const double res = (A * c - y).norm();
        (res > radius ? lam_hi : lam_lo) = lam;
    }
    return lasso_cd(A, y, std::max(0.5 * (lam_lo + lam_hi), 1e-14));
}

/// Minimum-norm least squares through the SVD pseudoinverse.
inline Eigen::VectorXd pinv_solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& y) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double tol = std::max(A.rows(), A.cols()) * sv(0) * 1e-14;
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(sv.size());
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > tol) inv(i) = 1.0 / sv(i);
    return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose() * y;
}

/// kappa_{s,p} by enumeration over every size-s support (N <= ~16).
template <typename Scalar>
double kappa_brute_force(const Eigen::Vector<Scalar, Eigen::Dynamic>& c, int s, int p) {
    const int n = static_cast<int>(c.size());
    if (s >= n) return 0.0;
    auto tail_norm = [&](const std::vector<int>& keep) {
        double acc = 0.0;
        for (int j = 0; j < n; ++j) {
            if (std::find(keep.begin(), keep.end(), j) != keep.end()) continue;
            const double mag = std::abs(c(j));
            acc += p == 1 ? mag : mag * mag;
        }
        return p == 1 ? acc : std::sqrt(acc);
    };
    if (s == 0) return tail_norm({});
    std::vector<int> keep = srfe::first_subset(s);
    double best = tail_norm(keep);
    while (srfe::next_subset(keep, n)) best = std::min(best, tail_norm(keep));
    return best;
}

inline double normal_cdf(double x, double stddev) {
    return 0.5 * std::erfc(-x / (stddev * std::sqrt(2.0)));
}

/// One-sample Kolmogorov-Smirnov statistic against N(0, stddev^2).
inline double ks_statistic(std::vector<double> samples, double stddev) {
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double cdf = normal_cdf(samples[i], stddev);
        d = std::max(d, std::abs(cdf - static_cast<double>(i) / n));
        d = std::max(d, std::abs(static_cast<double>(i + 1) / n - cdf));
    }
    return d;
}

}  // namespace oracles
