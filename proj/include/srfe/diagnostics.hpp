#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <utility>
#include <vector>

#include "srfe/bpdn.hpp"
#include "srfe/errors.hpp"

namespace srfe {

/// Parameters entering the feature/measurement complexity bounds.
struct TheoryParams {
    double gamma = 1.0;   // data std dev
    double sigma = 1.0;   // feature std dev
    int d = 1;
    int q = 1;
    int s = 1;            // target sparsity
    int n_features = 1;   // N
    int m = 1;
    double delta = 0.1;   // confidence, in (0,1)
    double epsilon = 0.1; // accuracy, > 0

    void validate() const {
        if (!(gamma > 0.0) || !(sigma > 0.0)) throw ConfigError("theory: gamma, sigma must be > 0");
        if (d < 1 || q < 1 || q > d) throw ConfigError("theory: need 1 <= q <= d");
        if (s < 1) throw ConfigError("theory: s must be >= 1");
        if (n_features < 1 || m < 1) throw ConfigError("theory: N, m must be >= 1");
        if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("theory: delta must be in (0,1)");
        if (!(epsilon > 0.0)) throw ConfigError("theory: epsilon must be > 0");
    }
};

struct CoherenceReport {
    double mu = 0.0;                          // max normalized column inner product
    int worst_j = -1;
    int worst_l = -1;
    std::vector<int> excluded_columns;        // zero-norm columns left out of the max
    double threshold = 0.0;                   // 4 / (sqrt(41) (2s - 1))
    int s = 1;
    bool passes = false;                      // mu <= threshold
};

/// Recovery threshold 4 / (sqrt(41) (2s - 1)).
inline double coherence_threshold(int s) {
    if (s < 1) throw ConfigError("coherence_threshold: s must be >= 1");
    return 4.0 / (std::sqrt(41.0) * (2.0 * s - 1.0));
}

/// Mutual coherence max_{j != l} |<a_j, a_l>| / (||a_j|| ||a_l||), with the
/// conjugate-linear inner product in the first argument. Zero-norm columns are
/// excluded from the max and listed. Brute force over all pairs, blocked
/// through the Gram product; meant for desk-scale N.
template <typename Scalar>
CoherenceReport mutual_coherence(const DenseMatrix<Scalar>& A, int s = 1) {
    if (A.cols() < 2) throw ConfigError("mutual_coherence: need at least 2 columns");
    CoherenceReport report;
    report.s = s;
    report.threshold = coherence_threshold(s);

    const Eigen::Index n = A.cols();
    Eigen::VectorXd norms(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        norms(j) = A.col(j).norm();
        if (norms(j) == 0.0) report.excluded_columns.push_back(static_cast<int>(j));
    }

    const Eigen::Index block = 256;
    for (Eigen::Index j0 = 0; j0 < n; j0 += block) {
        const Eigen::Index jn = std::min(n, j0 + block);
        const DenseMatrix<Scalar> g = A.middleCols(j0, jn - j0).adjoint() * A;
        for (Eigen::Index j = j0; j < jn; ++j) {
            if (norms(j) == 0.0) continue;
            for (Eigen::Index l = j + 1; l < n; ++l) {
                if (norms(l) == 0.0) continue;
                const double v = std::abs(g(j - j0, l)) / (norms(j) * norms(l));
                if (v > report.mu) {
                    report.mu = v;
                    report.worst_j = static_cast<int>(j);
                    report.worst_l = static_cast<int>(l);
                }
            }
        }
    }
    report.passes = report.mu <= report.threshold;
    return report;
}

template <typename Scalar>
CoherenceReport mutual_coherence(const FeatureMatrix<Scalar>& A, int s = 1) {
    return mutual_coherence<Scalar>(A.entries, s);
}

/// Minimum admissible gamma^2 sigma^2 for sparsity s at feature order q:
/// (1/2) ((sqrt(41)(2s-1)/2)^(2/q) - 1). The dense statement is q = d.
inline double uncertainty_lower_bound(int s, int q) {
    if (s < 1 || q < 1) throw ConfigError("uncertainty_lower_bound: s, q must be >= 1");
    const double base = std::sqrt(41.0) * (2.0 * s - 1.0) / 2.0;
    return 0.5 * (std::pow(base, 2.0 / q) - 1.0);
}

namespace detail {

inline double feature_count_core(const TheoryParams& p, double tail_term) {
    const double inner = 1.0 + std::sqrt(12.0 / p.d * std::log(static_cast<double>(p.m) / p.delta));
    const double mid = 4.0 * p.gamma * p.sigma * p.d * std::sqrt(inner);
    const double base = 1.0 + mid + tail_term;
    return 4.0 / (p.epsilon * p.epsilon) * base * base;
}

}  // namespace detail

/// Feature complexity for the dense expansion:
/// N = (4/eps^2) (1 + 4 gamma sigma d sqrt(1 + sqrt((12/d) log(m/delta))) + sqrt(log(1/delta)/2))^2.
inline double feature_count_bound(const TheoryParams& p) {
    p.validate();
    if (static_cast<double>(p.m) < p.delta) throw ConfigError("feature_count_bound: log(m/delta) < 0");
    return detail::feature_count_core(p, std::sqrt(0.5 * std::log(1.0 / p.delta)));
}

/// Order-q variant: the confidence tail becomes sqrt((q/2) log(d/delta)).
inline double feature_count_bound_order_q(const TheoryParams& p) {
    p.validate();
    if (static_cast<double>(p.m) < p.delta) throw ConfigError("feature_count_bound: log(m/delta) < 0");
    return detail::feature_count_core(p, std::sqrt(0.5 * p.q * std::log(p.d / p.delta)));
}

/// Measurement complexity
/// m = 4 (2 g^2 s^2 + 1)^max(2q-d,0) (g^2 s^2 + 1)^min(2q, 2d-2q) log(N^2/delta);
/// at q = d this collapses to the dense form 4 (2 g^2 s^2 + 1)^d log(N^2/delta).
inline double measurement_count_bound(const TheoryParams& p) {
    p.validate();
    const double gs2 = p.gamma * p.gamma * p.sigma * p.sigma;
    const int e1 = std::max(2 * p.q - p.d, 0);
    const int e2 = std::min(2 * p.q, 2 * p.d - 2 * p.q);
    const double log_term =
        std::log(static_cast<double>(p.n_features) * static_cast<double>(p.n_features) / p.delta);
    return 4.0 * std::pow(2.0 * gs2 + 1.0, e1) * std::pow(gs2 + 1.0, e2) * log_term;
}

/// Per-sample expectation of the column inner product for complex-exponential
/// features whose supports overlap in |G| coordinates:
/// Gamma = (2 g^2 s^2 + 1)^(-|G|/2) (g^2 s^2 + 1)^(-(2q - 2|G|)/2).
inline double expected_gram(double gamma, double sigma, int q, int overlap, int d = -1) {
    if (q < 1) throw ConfigError("expected_gram: q must be >= 1");
    if (d < 0) d = 2 * q;  // no ambient constraint unless given
    const int lo = std::max(2 * q - d, 0);
    if (overlap < lo || overlap > q)
        throw ConfigError("expected_gram: overlap out of range [" + std::to_string(lo) + "," +
                          std::to_string(q) + "]");
    const double gs2 = gamma * gamma * sigma * sigma;
    return std::pow(2.0 * gs2 + 1.0, -0.5 * overlap) * std::pow(gs2 + 1.0, -(q - overlap));
}

/// Error of the best s-term approximation, kappa_{s,p}(c), p in {1, 2}.
template <typename Scalar>
double best_s_term_error(const DenseVector<Scalar>& c, int s, int p) {
    if (p != 1 && p != 2) throw ConfigError("best_s_term_error: p must be 1 or 2");
    if (s < 0) throw ConfigError("best_s_term_error: s must be >= 0");
    const DenseVector<Scalar> tail = c - prune_top_s<Scalar>(c, std::min<int>(s, static_cast<int>(c.size())));
    return p == 1 ? tail.template lpNorm<1>() : tail.norm();
}

/// Radius covering all m Gaussian draws with probability >= 1 - delta:
/// R = gamma sqrt(d + sqrt(12 d log(m/delta))).
inline double sample_radius_bound(double gamma, int d, int m, double delta) {
    if (!(gamma > 0.0) || d < 1 || m < 1 || !(delta > 0.0 && delta < 1.0))
        throw ConfigError("sample_radius_bound: invalid inputs");
    return gamma * std::sqrt(d + std::sqrt(12.0 * d * std::log(static_cast<double>(m) / delta)));
}

/// rho-norm of the 1-D Gaussian bump f(x) = exp(-x^2 / (2 sigma_f^2)) under the
/// N(0, sigma_rho^2) feature density: the transform alpha is a Gaussian in
/// omega, the ratio alpha/rho peaks at omega = 0, and the sup is
/// sigma_f sigma_rho -- finite exactly when sigma_rho >= 1/sigma_f.
inline double rho_norm_gaussian_target(double sigma_f, double sigma_rho) {
    if (!(sigma_f > 0.0) || !(sigma_rho > 0.0))
        throw ConfigError("rho_norm_gaussian_target: sigmas must be > 0");
    if (sigma_rho < 1.0 / sigma_f)
        throw ConfigError("rho_norm_gaussian_target: not in F(phi,rho): sigma_rho < 1/sigma_f");
    return sigma_f * sigma_rho;
}

}  // namespace srfe
