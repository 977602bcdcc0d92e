#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "srfe/diagnostics.hpp"
#include "srfe/errors.hpp"
#include "srfe/feature_map.hpp"
#include "srfe/rng.hpp"
#include "srfe/sampling.hpp"

namespace srfe {

using ScalarField = std::function<double(const Eigen::VectorXd&)>;
using TransformFn = std::function<std::complex<double>(const Eigen::VectorXd&)>;

/// One term of a low-order decomposition: g acts on the coordinates listed in
/// `support`, passed in ascending index order.
struct OrderTerm {
    std::vector<int> support;  // 0-based, sorted
    ScalarField g;
};

/// A test target. `terms`, when nonempty, is a decomposition into terms on
/// pairwise-disjoint supports combined as (1/K) sum_j g_j; targets whose
/// natural terms share variables carry only the closed form and a declared
/// order.
struct TargetFunction {
    std::string name;
    int dim = 1;
    int declared_order = 1;
    ScalarField evaluate;
    std::vector<OrderTerm> terms;

    bool has_decomposition() const { return !terms.empty(); }

    double evaluate_decomposition(const Eigen::VectorXd& x) const {
        if (terms.empty()) throw ConfigError("target " + name + " has no term decomposition");
        double acc = 0.0;
        for (const auto& t : terms) {
            Eigen::VectorXd restricted(static_cast<Eigen::Index>(t.support.size()));
            for (std::size_t i = 0; i < t.support.size(); ++i)
                restricted(static_cast<Eigen::Index>(i)) = x(t.support[i]);
            acc += t.g(restricted);
        }
        return acc / static_cast<double>(terms.size());
    }
};

enum class NoiseKind { None, BoundedUniform, Gaussian };

/// Additive sample noise: bounded uniform on [-amount, amount] or centered
/// Gaussian with std dev amount.
struct NoiseSpec {
    NoiseKind kind = NoiseKind::None;
    double amount = 0.0;

    void validate() const {
        if (amount < 0.0) throw ConfigError("noise: amount must be >= 0");
    }
};

/// Sampling law for data points.
struct PointSpec {
    PointLaw law = PointLaw::Uniform;
    double gamma = 1.0;      // gaussian: N(0, gamma^2 I)
    double lo = -1.0;        // uniform box, per coordinate
    double hi = 1.0;
    double mix_gamma = 0.1;  // mixture: N(0, mix_gamma^2 I) + U[lo,hi]^d

    void validate() const {
        if (law == PointLaw::Gaussian && !(gamma > 0.0))
            throw ConfigError("points: gamma must be > 0");
        if ((law == PointLaw::Uniform || law == PointLaw::Mixture) && lo > hi)
            throw ConfigError("points: lo > hi");
        if (law == PointLaw::Mixture && !(mix_gamma > 0.0))
            throw ConfigError("points: mix_gamma must be > 0");
        if (law == PointLaw::External)
            throw ConfigError("points: external law cannot be sampled");
    }
};

/// Registry-time validation: decomposition supports must be pairwise disjoint
/// and no larger than the declared order.
inline void validate_target(const TargetFunction& t) {
    std::set<int> seen;
    for (const auto& term : t.terms) {
        if (term.support.empty()) throw ConfigError("target " + t.name + ": empty term support");
        if (static_cast<int>(term.support.size()) > t.declared_order)
            throw ConfigError("target " + t.name + ": term support larger than declared order");
        for (int i : term.support) {
            if (i < 0 || i >= t.dim) throw ConfigError("target " + t.name + ": support index out of range");
            if (!seen.insert(i).second)
                throw ConfigError("target " + t.name + ": term supports are not pairwise disjoint");
        }
    }
}

namespace detail {

inline double sinc_normalized(double x) {
    if (x == 0.0) return 1.0;
    const double px = M_PI * x;
    return std::sin(px) / px;
}

inline double sinc_unnormalized(double x) {
    if (x == 0.0) return 1.0;
    return std::sin(x) / x;
}

inline TargetFunction make_sinc_product(const std::string& name, double (*sinc)(double)) {
    TargetFunction t;
    t.name = name;
    t.dim = 5;
    t.declared_order = 2;
    t.evaluate = [sinc](const Eigen::VectorXd& x) {
        return sinc(x(0)) * std::pow(sinc(x(2)), 3) + sinc(x(1));
    };
    t.terms = {{{0, 2}, [sinc](const Eigen::VectorXd& u) { return 2.0 * sinc(u(0)) * std::pow(sinc(u(1)), 3); }},
               {{1}, [sinc](const Eigen::VectorXd& u) { return 2.0 * sinc(u(0)); }}};
    return t;
}

}  // namespace detail

/// Named targets from the experiment sections, each with dimension, declared
/// order, closed-form evaluator, and (when the terms are variable-disjoint) a
/// low-order decomposition.
inline const std::map<std::string, TargetFunction>& corpus() {
    static const std::map<std::string, TargetFunction> registry = [] {
        std::map<std::string, TargetFunction> reg;
        auto add = [&reg](TargetFunction t) {
            validate_target(t);
            reg.emplace(t.name, std::move(t));
        };

        {
            TargetFunction t;
            t.name = "order2-chain";
            t.dim = 10;
            t.declared_order = 2;
            t.evaluate = [](const Eigen::VectorXd& x) {
                double acc = 0.0;
                for (int l = 0; l < 9; ++l)
                    acc += std::exp(-x(l) * x(l)) / (1.0 + x(l + 1) * x(l + 1));
                return acc / 10.0;
            };
            add(std::move(t));  // consecutive terms share a variable: no disjoint split
        }
        {
            TargetFunction t;
            t.name = "sum-squared";
            t.dim = 10;
            t.declared_order = 2;
            t.evaluate = [](const Eigen::VectorXd& x) {
                const double s = x.sum();
                return s * s;
            };
            add(std::move(t));
        }
        {
            TargetFunction t;
            t.name = "inverse-sqrt-norm";
            t.dim = 5;
            t.declared_order = 5;
            t.evaluate = [](const Eigen::VectorXd& x) { return 1.0 / std::sqrt(1.0 + x.squaredNorm()); };
            add(std::move(t));
        }
        {
            TargetFunction t;
            t.name = "sqrt-norm";
            t.dim = 5;
            t.declared_order = 5;
            t.evaluate = [](const Eigen::VectorXd& x) { return std::sqrt(1.0 + x.squaredNorm()); };
            add(std::move(t));
        }
        add(detail::make_sinc_product("sinc-product", detail::sinc_normalized));
        add(detail::make_sinc_product("sinc-product-sinx", detail::sinc_unnormalized));
        {
            TargetFunction t;
            t.name = "ratio";
            t.dim = 5;  // uses three variables, embedded in the Table-1 ambient dimension
            t.declared_order = 3;
            t.evaluate = [](const Eigen::VectorXd& x) {
                return x(0) * x(1) / (1.0 + std::pow(x(2), 6));
            };
            t.terms = {{{0, 1, 2}, [](const Eigen::VectorXd& u) {
                            return u(0) * u(1) / (1.0 + std::pow(u(2), 6));
                        }}};
            add(std::move(t));
        }
        {
            TargetFunction t;
            t.name = "exp-abs";
            t.dim = 100;
            t.declared_order = 1;
            t.evaluate = [](const Eigen::VectorXd& x) {
                double acc = 0.0;
                for (Eigen::Index i = 0; i < x.size(); ++i) acc += std::exp(-std::abs(x(i)));
                return acc;
            };
            const int d = t.dim;
            for (int i = 0; i < d; ++i)
                t.terms.push_back({{i}, [d](const Eigen::VectorXd& u) {
                                       return d * std::exp(-std::abs(u(0)));
                                   }});
            add(std::move(t));
        }
        {
            TargetFunction t;
            t.name = "ishigami";
            t.dim = 3;
            t.declared_order = 2;
            t.evaluate = [](const Eigen::VectorXd& x) {
                return std::sin(x(0)) + 7.0 * std::pow(std::sin(x(1)), 2) +
                       0.1 * std::pow(x(2), 4) * std::sin(x(0));
            };
            add(std::move(t));  // sin(x1) and x3^4 sin(x1) share x1
        }
        {
            TargetFunction t;
            t.name = "runge";
            t.dim = 1;
            t.declared_order = 1;
            t.evaluate = [](const Eigen::VectorXd& x) { return 1.0 / (1.0 + 25.0 * x(0) * x(0)); };
            t.terms = {{{0}, [](const Eigen::VectorXd& u) { return 1.0 / (1.0 + 25.0 * u(0) * u(0)); }}};
            add(std::move(t));
        }
        {
            TargetFunction t;
            t.name = "sine-packet";
            t.dim = 1;
            t.declared_order = 1;
            t.evaluate = [](const Eigen::VectorXd& x) {
                return std::exp(-x(0) * x(0) / (2.0 * 0.25)) * std::sin(8.0 * x(0));
            };
            t.terms = {{{0}, [](const Eigen::VectorXd& u) {
                            return std::exp(-u(0) * u(0) / (2.0 * 0.25)) * std::sin(8.0 * u(0));
                        }}};
            add(std::move(t));
        }
        {
            TargetFunction t;
            t.name = "triangle";
            t.dim = 1;
            t.declared_order = 1;
            t.evaluate = [](const Eigen::VectorXd& x) { return std::max(0.0, 1.0 - std::abs(x(0))); };
            t.terms = {{{0}, [](const Eigen::VectorXd& u) { return std::max(0.0, 1.0 - std::abs(u(0))); }}};
            add(std::move(t));
        }
        return reg;
    }();
    return registry;
}

inline const TargetFunction& target_by_name(const std::string& name) {
    const auto& reg = corpus();
    const auto it = reg.find(name);
    if (it == reg.end()) throw ConfigError("unknown target function: " + name);
    return it->second;
}

namespace detail {

inline constexpr std::uint64_t kPointStream = 0x70747330ULL;  // "pts0"
inline constexpr std::uint64_t kNoiseStream = 0x6e6f6973ULL;  // "nois"

inline Eigen::MatrixXd sample_points(const PointSpec& spec, int dim, int m, Rng& rng) {
    Eigen::MatrixXd pts(dim, m);
    for (int k = 0; k < m; ++k) {
        for (int i = 0; i < dim; ++i) {
            switch (spec.law) {
                case PointLaw::Gaussian: pts(i, k) = rng.normal(0.0, spec.gamma); break;
                case PointLaw::Uniform: pts(i, k) = rng.uniform(spec.lo, spec.hi); break;
                case PointLaw::Mixture:
                    pts(i, k) = rng.normal(0.0, spec.mix_gamma) + rng.uniform(spec.lo, spec.hi);
                    break;
                case PointLaw::External: throw ConfigError("points: external law cannot be sampled");
            }
        }
    }
    return pts;
}

}  // namespace detail

/// Draws m points from the stated law and observes y_k = f(x_k) + e_k.
inline std::pair<PointSet, Eigen::VectorXd> sample_dataset(const TargetFunction& target,
                                                           const PointSpec& spec, int m,
                                                           const NoiseSpec& noise,
                                                           std::uint64_t seed) {
    spec.validate();
    noise.validate();
    if (m < 0) throw ConfigError("sample_dataset: negative sample count");

    Rng point_rng = Rng::substream(seed, detail::kPointStream);
    Rng noise_rng = Rng::substream(seed, detail::kNoiseStream);

    PointSet points;
    points.law = spec.law;
    points.points = detail::sample_points(spec, target.dim, m, point_rng);

    Eigen::VectorXd y(m);
    for (int k = 0; k < m; ++k) {
        double e = 0.0;
        switch (noise.kind) {
            case NoiseKind::None: break;
            case NoiseKind::BoundedUniform: e = noise_rng.uniform(-noise.amount, noise.amount); break;
            case NoiseKind::Gaussian: e = noise_rng.normal(0.0, noise.amount); break;
        }
        y(k) = target.evaluate(points.points.col(k)) + e;
    }
    return {std::move(points), std::move(y)};
}

/// Best-fit coefficients c*_j = alpha(w_j) / (N rho(w_j)) for a known transform
/// alpha and feature density rho over the drawn weights.
inline Eigen::VectorXcd best_fit_coefficients(const TransformFn& alpha,
                                              const std::function<double(const Eigen::VectorXd&)>& rho,
                                              const WeightSet& weights) {
    const int n = weights.count();
    Eigen::VectorXcd c(n);
    for (int j = 0; j < n; ++j) {
        const Eigen::VectorXd w = weights.weights.col(j);
        const double density = rho(w);
        if (!(density > 0.0))
            throw ConfigError("best_fit_coefficients: vanishing feature density at weight " +
                              std::to_string(j));
        c(j) = alpha(w) / (static_cast<double>(n) * density);
    }
    return c;
}

/// One term of an order-q transform: alpha_l acts on the restriction of omega
/// to the term's support.
struct OrderQTransformTerm {
    std::vector<int> support;  // sorted, 0-based
    TransformFn alpha;
};

/// Per-term best-fit coefficients for order-q targets under a complete set of
/// q-sparse weights: coefficients average alpha_l(w_j) / (n rho_q(w_j)) over
/// the terms whose support matches the weight's support.
inline Eigen::VectorXcd best_fit_coefficients_order_q(
    const std::vector<OrderQTransformTerm>& terms,
    const std::function<double(const Eigen::VectorXd&)>& rho_q, const WeightSet& weights,
    int n_per_subset) {
    if (n_per_subset < 1) throw ConfigError("best_fit_coefficients_order_q: n must be >= 1");
    const int n = weights.count();
    const auto k_terms = static_cast<double>(terms.size());
    Eigen::VectorXcd c = Eigen::VectorXcd::Zero(n);
    for (int j = 0; j < n; ++j) {
        const auto& support = weights.supports[static_cast<std::size_t>(j)];
        for (const auto& term : terms) {
            if (term.support != support) continue;
            Eigen::VectorXd restricted(static_cast<Eigen::Index>(support.size()));
            for (std::size_t i = 0; i < support.size(); ++i)
                restricted(static_cast<Eigen::Index>(i)) = weights.weights(support[i], j);
            const double density = rho_q(restricted);
            if (!(density > 0.0))
                throw ConfigError("best_fit_coefficients_order_q: vanishing density at weight " +
                                  std::to_string(j));
            c(j) += term.alpha(restricted) / (static_cast<double>(n_per_subset) * density);
        }
        c(j) /= k_terms;
    }
    return c;
}

/// 1-D Gaussian bump f(x) = exp(-x^2 / (2 sigma_f^2)) with its exact Fourier
/// pair: the known-transform fixture for the best-fit construction.
struct GaussianBumpFixture {
    double sigma_f = 1.0;
    double sigma_rho = 1.0;
    double rho_norm = 1.0;  // sup |alpha/rho| = sigma_f sigma_rho

    double evaluate(double x) const { return std::exp(-x * x / (2.0 * sigma_f * sigma_f)); }

    std::complex<double> alpha(double omega) const {
        return sigma_f / std::sqrt(2.0 * M_PI) * std::exp(-0.5 * sigma_f * sigma_f * omega * omega);
    }

    double rho(double omega) const {
        return std::exp(-0.5 * omega * omega / (sigma_rho * sigma_rho)) /
               (sigma_rho * std::sqrt(2.0 * M_PI));
    }
};

inline GaussianBumpFixture gaussian_bump_fixture(double sigma_f = 1.0, double sigma_rho = 1.0) {
    GaussianBumpFixture fx;
    fx.sigma_f = sigma_f;
    fx.sigma_rho = sigma_rho;
    fx.rho_norm = rho_norm_gaussian_target(sigma_f, sigma_rho);
    return fx;
}

}  // namespace srfe
