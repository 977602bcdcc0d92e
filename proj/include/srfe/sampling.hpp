#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "srfe/combinatorics.hpp"
#include "srfe/errors.hpp"
#include "srfe/rng.hpp"

namespace srfe {

enum class SamplingScheme { Dense, Complete, RandomSubset, Bernoulli };

inline const char* to_string(SamplingScheme s) {
    switch (s) {
        case SamplingScheme::Dense: return "dense";
        case SamplingScheme::Complete: return "complete";
        case SamplingScheme::RandomSubset: return "random-subset";
        case SamplingScheme::Bernoulli: return "bernoulli";
    }
    return "?";
}

inline SamplingScheme scheme_from_string(const std::string& s) {
    if (s == "dense") return SamplingScheme::Dense;
    if (s == "complete") return SamplingScheme::Complete;
    if (s == "random-subset") return SamplingScheme::RandomSubset;
    if (s == "bernoulli") return SamplingScheme::Bernoulli;
    throw ConfigError("unknown sampling scheme: " + s);
}

struct SamplingConfig {
    int dim = 0;             // d
    int n_features = 0;      // N; ignored by the complete scheme when n_per_subset is set
    int n_per_subset = 0;    // n; complete scheme draws n weights per size-q subset
    double sigma = 1.0;      // std dev of on-support entries
    int q = 0;               // support size; 0 means dense (q = dim)
    std::optional<std::pair<double, double>> bias_range;  // radians; nullopt = no bias
    std::uint64_t seed = 0;
    SamplingScheme scheme = SamplingScheme::Dense;
    std::uint64_t feature_cap = 10'000'000;  // guard for n * C(d,q)

    int effective_q() const { return q > 0 ? q : dim; }
};

/// N random feature weight vectors, their support sets, and optional biases.
/// Off-support entries are exactly zero. Immutable after construction and safe
/// to share across threads.
struct WeightSet {
    Eigen::MatrixXd weights;                 // dim x N, one column per feature
    std::vector<double> biases;              // empty = bias-free features
    std::vector<std::vector<int>> supports;  // sorted 0-based index sets
    double sigma = 1.0;
    int q = 0;
    SamplingScheme scheme = SamplingScheme::Dense;

    int dim() const { return static_cast<int>(weights.rows()); }
    int count() const { return static_cast<int>(weights.cols()); }
    bool has_bias() const { return !biases.empty(); }
};

namespace detail {

// Stream id reserved for bias draws; subset substreams use ids 0..C(d,q)-1.
inline constexpr std::uint64_t kBiasStream = 0x7362696173ULL;  // "sbias"

inline void validate_common(const SamplingConfig& cfg) {
    if (cfg.dim < 1) throw ConfigError("sampling: dim must be >= 1");
    if (!(cfg.sigma > 0.0)) throw ConfigError("sampling: sigma must be > 0");
    const int q = cfg.effective_q();
    if (q < 1 || q > cfg.dim) throw ConfigError("sampling: q must satisfy 1 <= q <= dim");
    if (cfg.bias_range && cfg.bias_range->first > cfg.bias_range->second)
        throw ConfigError("sampling: bias range lo > hi");
}

inline void require_count(const SamplingConfig& cfg) {
    if (cfg.n_features < 1) throw ConfigError("sampling: n_features must be >= 1");
}

}  // namespace detail

/// n i.i.d. uniform draws on [lo, hi]; deterministic per seed.
inline std::vector<double> draw_biases(int n, double lo, double hi, std::uint64_t seed) {
    if (lo > hi) throw ConfigError("draw_biases: lo > hi");
    if (n < 0) throw ConfigError("draw_biases: negative count");
    Rng rng(seed);
    std::vector<double> b(static_cast<std::size_t>(n));
    for (double& v : b) v = rng.uniform(lo, hi);
    return b;
}

namespace detail {

inline void attach_biases(WeightSet& ws, const SamplingConfig& cfg) {
    if (cfg.bias_range) {
        ws.biases = draw_biases(ws.count(), cfg.bias_range->first, cfg.bias_range->second,
                                mix64(cfg.seed, kBiasStream));
    }
}

}  // namespace detail

/// N i.i.d. weights from the spherical Gaussian N(0, sigma^2 I_d).
inline WeightSet draw_dense_weights(const SamplingConfig& cfg) {
    detail::validate_common(cfg);
    detail::require_count(cfg);
    if (cfg.scheme != SamplingScheme::Dense)
        throw ConfigError("draw_dense_weights: scheme must be dense");

    WeightSet ws;
    ws.sigma = cfg.sigma;
    ws.q = cfg.dim;
    ws.scheme = SamplingScheme::Dense;
    ws.weights.setZero(cfg.dim, cfg.n_features);

    // Stream 0, entries column-major: matches the complete scheme at q = d so
    // the two collapse bit-exactly.
    Rng rng = Rng::substream(cfg.seed, 0);
    for (int j = 0; j < cfg.n_features; ++j)
        for (int i = 0; i < cfg.dim; ++i) ws.weights(i, j) = rng.normal(0.0, cfg.sigma);

    std::vector<int> full(static_cast<std::size_t>(cfg.dim));
    for (int i = 0; i < cfg.dim; ++i) full[static_cast<std::size_t>(i)] = i;
    ws.supports.assign(static_cast<std::size_t>(cfg.n_features), full);
    detail::attach_biases(ws, cfg);
    return ws;
}

/// Complete set of q-sparse feature weights: n weights per size-q subset of
/// {1..d}, on-support entries i.i.d. N(0, sigma^2). N = n * C(d,q). Subsets are
/// laid out in lexicographic order, each with its own RNG substream.
inline WeightSet draw_complete_sparse_weights(const SamplingConfig& cfg) {
    detail::validate_common(cfg);
    if (cfg.scheme != SamplingScheme::Complete)
        throw ConfigError("draw_complete_sparse_weights: scheme must be complete");
    if (cfg.n_per_subset < 1) throw ConfigError("sampling: n_per_subset must be >= 1");

    const int q = cfg.effective_q();
    const auto n_subsets = binomial(cfg.dim, q);
    if (!n_subsets || *n_subsets > cfg.feature_cap ||
        static_cast<std::uint64_t>(cfg.n_per_subset) * *n_subsets > cfg.feature_cap) {
        throw BudgetError("combinatorial budget exceeded: n * C(" + std::to_string(cfg.dim) +
                          "," + std::to_string(q) + ") > " + std::to_string(cfg.feature_cap));
    }
    const std::uint64_t total = static_cast<std::uint64_t>(cfg.n_per_subset) * *n_subsets;

    WeightSet ws;
    ws.sigma = cfg.sigma;
    ws.q = q;
    ws.scheme = SamplingScheme::Complete;
    ws.weights.setZero(cfg.dim, static_cast<Eigen::Index>(total));
    ws.supports.reserve(total);

    std::vector<int> subset = first_subset(q);
    std::uint64_t rank = 0;
    int col = 0;
    do {
        Rng rng = Rng::substream(cfg.seed, rank);
        for (int k = 0; k < cfg.n_per_subset; ++k, ++col) {
            for (int idx : subset) ws.weights(idx, col) = rng.normal(0.0, cfg.sigma);
            ws.supports.push_back(subset);
        }
        ++rank;
    } while (next_subset(subset, cfg.dim));
    detail::attach_biases(ws, cfg);
    return ws;
}

/// N q-sparse weights whose supports are drawn uniformly among size-q subsets.
inline WeightSet draw_subset_sparse_weights(const SamplingConfig& cfg) {
    detail::validate_common(cfg);
    detail::require_count(cfg);
    if (cfg.scheme != SamplingScheme::RandomSubset)
        throw ConfigError("draw_subset_sparse_weights: scheme must be random-subset");

    const int q = cfg.effective_q();
    WeightSet ws;
    ws.sigma = cfg.sigma;
    ws.q = q;
    ws.scheme = SamplingScheme::RandomSubset;
    ws.weights.setZero(cfg.dim, cfg.n_features);
    ws.supports.reserve(static_cast<std::size_t>(cfg.n_features));

    Rng rng = Rng::substream(cfg.seed, 0);
    std::vector<int> pool(static_cast<std::size_t>(cfg.dim));
    for (int j = 0; j < cfg.n_features; ++j) {
        // Partial Fisher-Yates: uniform size-q subset without enumerating C(d,q).
        for (int i = 0; i < cfg.dim; ++i) pool[static_cast<std::size_t>(i)] = i;
        for (int k = 0; k < q; ++k) {
            const auto pick = k + static_cast<int>(rng.uniform_below(
                                      static_cast<std::uint64_t>(cfg.dim - k)));
            std::swap(pool[static_cast<std::size_t>(k)], pool[static_cast<std::size_t>(pick)]);
        }
        std::vector<int> support(pool.begin(), pool.begin() + q);
        std::sort(support.begin(), support.end());
        for (int idx : support) ws.weights(idx, j) = rng.normal(0.0, cfg.sigma);
        ws.supports.push_back(std::move(support));
    }
    detail::attach_biases(ws, cfg);
    return ws;
}

/// Entrywise sparsification: each entry is 0 with probability 1 - q/d and
/// N(0, sigma^2) otherwise; supports record the realized nonzero sets.
inline WeightSet draw_bernoulli_sparse_weights(const SamplingConfig& cfg) {
    detail::validate_common(cfg);
    detail::require_count(cfg);
    if (cfg.scheme != SamplingScheme::Bernoulli)
        throw ConfigError("draw_bernoulli_sparse_weights: scheme must be bernoulli");

    const int q = cfg.effective_q();
    const double keep = static_cast<double>(q) / static_cast<double>(cfg.dim);
    WeightSet ws;
    ws.sigma = cfg.sigma;
    ws.q = q;
    ws.scheme = SamplingScheme::Bernoulli;
    ws.weights.setZero(cfg.dim, cfg.n_features);
    ws.supports.reserve(static_cast<std::size_t>(cfg.n_features));

    Rng rng = Rng::substream(cfg.seed, 0);
    for (int j = 0; j < cfg.n_features; ++j) {
        std::vector<int> support;
        for (int i = 0; i < cfg.dim; ++i) {
            if (rng.uniform01() < keep) {  // keep-probability q/d; q = d keeps all
                ws.weights(i, j) = rng.normal(0.0, cfg.sigma);
                support.push_back(i);
            }
        }
        ws.supports.push_back(std::move(support));
    }
    detail::attach_biases(ws, cfg);
    return ws;
}

inline WeightSet draw_weights(const SamplingConfig& cfg) {
    switch (cfg.scheme) {
        case SamplingScheme::Dense: return draw_dense_weights(cfg);
        case SamplingScheme::Complete: return draw_complete_sparse_weights(cfg);
        case SamplingScheme::RandomSubset: return draw_subset_sparse_weights(cfg);
        case SamplingScheme::Bernoulli: return draw_bernoulli_sparse_weights(cfg);
    }
    throw ConfigError("draw_weights: unknown scheme");
}

}  // namespace srfe
