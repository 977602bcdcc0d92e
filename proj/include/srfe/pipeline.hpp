#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <optional>

#include "srfe/bpdn.hpp"
#include "srfe/combinatorics.hpp"
#include "srfe/errors.hpp"
#include "srfe/feature_map.hpp"
#include "srfe/sampling.hpp"

namespace srfe {

/// Fitted random feature expansion f#(x) = sum_j c_j phi(<x, w_j> + b_j).
template <typename Scalar>
struct SrfeModel {
    WeightSet weights;
    ActivationKind activation = ActivationKind::Sine;
    DenseVector<Scalar> coefficients;
    std::optional<int> pruned_to;
    SolveReport fit_report;

    int feature_count() const { return weights.count(); }
};

struct FitConfig {
    SamplingConfig sampling;
    ActivationKind activation = ActivationKind::Sine;
    double eta = 0.0;
    std::optional<int> prune_s;
    SolverConfig solver;
    int n_threads = 1;  // feature-matrix construction only; results are thread-count independent
};

template <typename Scalar>
using Dataset = std::pair<PointSet, DenseVector<Scalar>>;

namespace detail {

template <typename Scalar>
SrfeModel<Scalar> fit_with_weights(const PointSet& points, const DenseVector<Scalar>& y,
                                   WeightSet weights, const FitConfig& config) {
    if (points.count() != static_cast<int>(y.size()))
        throw ShapeError("fit: y length != point count");

    SrfeModel<Scalar> model;
    model.activation = config.activation;
    model.weights = std::move(weights);

    const FeatureMatrix<Scalar> A =
        build_feature_matrix<Scalar>(points, model.weights, config.activation, config.n_threads);
    SolverConfig solver = config.solver;
    solver.eta = config.eta;
    auto solved = solve_bpdn<Scalar>(A, y, solver);
    model.coefficients = std::move(solved.coefficients);
    model.fit_report = solved.report;
    if (config.prune_s) {
        model.coefficients = prune_top_s<Scalar>(model.coefficients, *config.prune_s);
        model.pruned_to = config.prune_s;
        model.fit_report.sparsity = count_nonzero<Scalar>(model.coefficients, solver.zero_tol);
        model.fit_report.objective = model.coefficients.template lpNorm<1>();
    }
    return model;
}

}  // namespace detail

/// SRFE: dense Gaussian weights, feature matrix, BPDN solve, optional pruning.
template <typename Scalar>
SrfeModel<Scalar> fit_srfe(const Dataset<Scalar>& dataset, const FitConfig& config) {
    if (config.sampling.scheme != SamplingScheme::Dense)
        throw ConfigError("fit_srfe: sampling scheme must be dense");
    return detail::fit_with_weights<Scalar>(dataset.first, dataset.second,
                                            draw_weights(config.sampling), config);
}

/// SRFE-S: identical pipeline with q-sparse feature weights.
template <typename Scalar>
SrfeModel<Scalar> fit_srfe_s(const Dataset<Scalar>& dataset, const FitConfig& config) {
    if (config.sampling.scheme == SamplingScheme::Dense)
        throw ConfigError("fit_srfe_s: sampling scheme must be complete, random-subset, or bernoulli");
    return detail::fit_with_weights<Scalar>(dataset.first, dataset.second,
                                            draw_weights(config.sampling), config);
}

template <typename Scalar>
DenseVector<Scalar> evaluate_expansion(const SrfeModel<Scalar>& model, const PointSet& points,
                                       int n_threads = 1) {
    return evaluate_expansion<Scalar>(model.weights, model.activation, model.coefficients, points,
                                      n_threads);
}

/// sqrt( sum |y_k - p_k|^2 / sum |y_k|^2 ).
template <typename Scalar>
double relative_error(const DenseVector<Scalar>& predictions, const DenseVector<Scalar>& truth) {
    if (predictions.size() != truth.size())
        throw ShapeError("relative_error: length mismatch");
    const double denom = truth.squaredNorm();
    if (denom <= 0.0) throw ConfigError("relative_error: reference values are all zero");
    return std::sqrt((predictions - truth).squaredNorm() / denom);
}

template <typename Scalar>
double relative_test_error(const SrfeModel<Scalar>& model, const Dataset<Scalar>& test,
                           int n_threads = 1) {
    return relative_error<Scalar>(evaluate_expansion<Scalar>(model, test.first, n_threads),
                                  test.second);
}

/// eta = sqrt(2 (eps^2 ||f||_rho^2 + E^2)).
inline double eta_from_theory(double epsilon, double rho_norm, double noise_bound) {
    if (epsilon < 0.0 || rho_norm < 0.0 || noise_bound < 0.0)
        throw ConfigError("eta_from_theory: inputs must be >= 0");
    return std::sqrt(2.0 * (epsilon * epsilon * rho_norm * rho_norm + noise_bound * noise_bound));
}

/// Order-q variant: eta = sqrt(2 eps^2 C(d,q) |||f|||^2 + 2 E^2).
inline double eta_from_theory_order_q(double epsilon, int d, int q, double triple_norm,
                                      double noise_bound) {
    if (epsilon < 0.0 || triple_norm < 0.0 || noise_bound < 0.0)
        throw ConfigError("eta_from_theory_order_q: inputs must be >= 0");
    if (q < 1 || q > d) throw ConfigError("eta_from_theory_order_q: need 1 <= q <= d");
    const auto choose = binomial(d, q);
    if (!choose) throw ConfigError("eta_from_theory_order_q: C(d,q) overflows");
    return std::sqrt(2.0 * epsilon * epsilon * static_cast<double>(*choose) * triple_norm * triple_norm +
                     2.0 * noise_bound * noise_bound);
}

}  // namespace srfe
