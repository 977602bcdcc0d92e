#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <string>
#include <thread>
#include <type_traits>
#include <vector>

#include "srfe/errors.hpp"
#include "srfe/sampling.hpp"

namespace srfe {

enum class ActivationKind { ComplexExponential, Sine, Cosine, Relu };

inline bool is_complex(ActivationKind k) { return k == ActivationKind::ComplexExponential; }

inline const char* to_string(ActivationKind k) {
    switch (k) {
        case ActivationKind::ComplexExponential: return "complex-exponential";
        case ActivationKind::Sine: return "sine";
        case ActivationKind::Cosine: return "cosine";
        case ActivationKind::Relu: return "relu";
    }
    return "?";
}

inline ActivationKind activation_from_string(const std::string& s) {
    if (s == "complex-exponential") return ActivationKind::ComplexExponential;
    if (s == "sine") return ActivationKind::Sine;
    if (s == "cosine") return ActivationKind::Cosine;
    if (s == "relu") return ActivationKind::Relu;
    throw ConfigError("unknown activation: " + s);
}

enum class PointLaw { Gaussian, Uniform, Mixture, External };

/// m points in R^d, one column per point, with a record of how they were drawn.
struct PointSet {
    Eigen::MatrixXd points;  // d x m
    PointLaw law = PointLaw::External;

    int dim() const { return static_cast<int>(points.rows()); }
    int count() const { return static_cast<int>(points.cols()); }
};

template <typename Scalar>
struct FeatureMatrix {
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> entries;  // m x N
    ActivationKind activation = ActivationKind::Sine;

    int rows() const { return static_cast<int>(entries.rows()); }
    int cols() const { return static_cast<int>(entries.cols()); }
};

namespace detail {

template <typename Scalar>
inline Scalar apply_activation(ActivationKind kind, double t) {
    if constexpr (std::is_same_v<Scalar, std::complex<double>>) {
        if (kind == ActivationKind::ComplexExponential)
            return {std::cos(t), std::sin(t)};
        throw ConfigError("complex feature matrix requires complex-exponential activation");
    } else {
        switch (kind) {
            case ActivationKind::Sine: return std::sin(t);
            case ActivationKind::Cosine: return std::cos(t);
            case ActivationKind::Relu: return t > 0.0 ? t : 0.0;
            case ActivationKind::ComplexExponential:
                throw ConfigError("complex-exponential activation requires a complex matrix");
        }
        throw ConfigError("unknown activation");
    }
}

// Inner product over the recorded support, ascending index order. Identical to
// the dense dot product because off-support entries are exactly zero.
inline double support_dot(const Eigen::MatrixXd& points, int k, const Eigen::MatrixXd& weights,
                          int j, const std::vector<int>& support) {
    double t = 0.0;
    for (int i : support) t += points(i, k) * weights(i, j);
    return t;
}

// Runs fn(begin, end) over a partition of [0, m) on n_threads threads. Every
// index is handled exactly once, so results do not depend on the thread count.
template <typename Fn>
inline void parallel_over_rows(int m, int n_threads, Fn&& fn) {
    if (n_threads <= 1 || m < 2 * n_threads) {
        fn(0, m);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    const int chunk = (m + n_threads - 1) / n_threads;
    for (int t = 0; t < n_threads; ++t) {
        const int lo = t * chunk;
        const int hi = std::min(m, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([&fn, lo, hi] { fn(lo, hi); });
    }
    for (auto& th : pool) th.join();
}

}  // namespace detail

/// Random feature matrix A with a_{kj} = phi(<x_k, w_j> + b_j). Sparse weight
/// supports are exploited in the inner products; the result matches the dense
/// computation entrywise.
template <typename Scalar>
FeatureMatrix<Scalar> build_feature_matrix(const PointSet& points, const WeightSet& weights,
                                           ActivationKind activation, int n_threads = 1) {
    if (points.dim() != weights.dim())
        throw ShapeError("build_feature_matrix: point dim " + std::to_string(points.dim()) +
                         " != weight dim " + std::to_string(weights.dim()));
    if (weights.has_bias() && static_cast<int>(weights.biases.size()) != weights.count())
        throw ShapeError("build_feature_matrix: bias list length != feature count");
    if (is_complex(activation) != std::is_same_v<Scalar, std::complex<double>>)
        throw ConfigError("build_feature_matrix: scalar type does not match activation");

    const int m = points.count();
    const int n = weights.count();
    FeatureMatrix<Scalar> out;
    out.activation = activation;
    out.entries.resize(m, n);

    detail::parallel_over_rows(m, n_threads, [&](int lo, int hi) {
        for (int k = lo; k < hi; ++k) {
            for (int j = 0; j < n; ++j) {
                double t = detail::support_dot(points.points, k, weights.weights, j,
                                               weights.supports[static_cast<std::size_t>(j)]);
                if (weights.has_bias()) t += weights.biases[static_cast<std::size_t>(j)];
                out.entries(k, j) = detail::apply_activation<Scalar>(activation, t);
            }
        }
    });
    return out;
}

/// Evaluates sum_j c_j phi(<x, w_j> + b_j) at every point, skipping zero
/// coefficients (fast path after pruning).
template <typename Scalar>
Eigen::Vector<Scalar, Eigen::Dynamic> evaluate_expansion(
    const WeightSet& weights, ActivationKind activation,
    const Eigen::Vector<Scalar, Eigen::Dynamic>& coefficients, const PointSet& points,
    int n_threads = 1) {
    if (points.dim() != weights.dim())
        throw ShapeError("evaluate_expansion: point dim != weight dim");
    if (static_cast<int>(coefficients.size()) != weights.count())
        throw ShapeError("evaluate_expansion: coefficient length != feature count");
    if (is_complex(activation) != std::is_same_v<Scalar, std::complex<double>>)
        throw ConfigError("evaluate_expansion: scalar type does not match activation");

    std::vector<int> active;
    for (int j = 0; j < weights.count(); ++j)
        if (coefficients(j) != Scalar(0)) active.push_back(j);

    const int m = points.count();
    Eigen::Vector<Scalar, Eigen::Dynamic> values(m);
    values.setZero();
    detail::parallel_over_rows(m, n_threads, [&](int lo, int hi) {
        for (int k = lo; k < hi; ++k) {
            Scalar acc{};
            for (int j : active) {
                double t = detail::support_dot(points.points, k, weights.weights, j,
                                               weights.supports[static_cast<std::size_t>(j)]);
                if (weights.has_bias()) t += weights.biases[static_cast<std::size_t>(j)];
                acc += coefficients(j) * detail::apply_activation<Scalar>(activation, t);
            }
            values(k) = acc;
        }
    });
    return values;
}

}  // namespace srfe
