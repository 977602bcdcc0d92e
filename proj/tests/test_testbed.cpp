#include <catch2/catch_amalgamated.hpp>

#include <complex>

#include "srfe/experiment.hpp"
#include "srfe/io.hpp"
#include "srfe/testbed.hpp"

using namespace srfe;
using Complex = std::complex<double>;

TEST_CASE("corpus lookups and point values") {
    REQUIRE_THROWS_AS(target_by_name("no-such-target"), ConfigError);

    Eigen::Vector3d x(M_PI / 2.0, 0.0, 0.0);
    REQUIRE(target_by_name("ishigami").evaluate(x) == Catch::Approx(1.0).margin(1e-15));

    REQUIRE(target_by_name("sum-squared").evaluate(Eigen::VectorXd::Zero(10)) == 0.0);
    REQUIRE(target_by_name("order2-chain").evaluate(Eigen::VectorXd::Zero(10)) ==
            Catch::Approx(0.9).margin(1e-15));

    // sinc conventions differ away from zero and agree at zero.
    Eigen::VectorXd z = Eigen::VectorXd::Zero(5);
    REQUIRE(target_by_name("sinc-product").evaluate(z) == Catch::Approx(2.0).margin(1e-15));
    REQUIRE(target_by_name("sinc-product-sinx").evaluate(z) == Catch::Approx(2.0).margin(1e-15));
    Eigen::VectorXd half = Eigen::VectorXd::Zero(5);
    half(0) = 0.5;
    const double norm_val = target_by_name("sinc-product").evaluate(half);
    const double sinx_val = target_by_name("sinc-product-sinx").evaluate(half);
    REQUIRE(norm_val != sinx_val);
    REQUIRE(norm_val == Catch::Approx(std::sin(M_PI / 2.0) / (M_PI / 2.0) + 1.0).margin(1e-12));
}

TEST_CASE("declared decompositions match the closed forms") {
    Rng rng(42);
    for (const auto& [name, target] : corpus()) {
        if (!target.has_decomposition()) continue;
        double worst = 0.0;
        const int n_points = name == "exp-abs" ? 2000 : 10000;
        for (int t = 0; t < n_points; ++t) {
            Eigen::VectorXd x(target.dim);
            for (int i = 0; i < target.dim; ++i) x(i) = rng.uniform(-2.0, 2.0);
            worst = std::max(worst,
                             std::abs(target.evaluate(x) - target.evaluate_decomposition(x)));
        }
        INFO(name);
        REQUIRE(worst < 1e-12);
    }
}

TEST_CASE("decomposition validation rejects overlapping supports") {
    TargetFunction bad;
    bad.name = "bad";
    bad.dim = 3;
    bad.declared_order = 2;
    bad.evaluate = [](const Eigen::VectorXd&) { return 0.0; };
    bad.terms = {{{0, 1}, [](const Eigen::VectorXd&) { return 0.0; }},
                 {{1, 2}, [](const Eigen::VectorXd&) { return 0.0; }}};
    REQUIRE_THROWS_AS(validate_target(bad), ConfigError);

    TargetFunction too_big;
    too_big.name = "too-big";
    too_big.dim = 3;
    too_big.declared_order = 1;
    too_big.evaluate = [](const Eigen::VectorXd&) { return 0.0; };
    too_big.terms = {{{0, 1}, [](const Eigen::VectorXd&) { return 0.0; }}};
    REQUIRE_THROWS_AS(validate_target(too_big), ConfigError);
}

TEST_CASE("dataset synthesis: noise models") {
    const TargetFunction& runge = target_by_name("runge");
    const PointSpec uniform{PointLaw::Uniform, 1.0, -1.0, 1.0, 0.1};

    const auto clean = sample_dataset(runge, uniform, 100, NoiseSpec{}, 5);
    for (int k = 0; k < 100; ++k)
        REQUIRE(clean.second(k) == runge.evaluate(clean.first.points.col(k)));

    const auto bounded =
        sample_dataset(runge, uniform, 500, NoiseSpec{NoiseKind::BoundedUniform, 0.2}, 6);
    for (int k = 0; k < 500; ++k)
        REQUIRE(std::abs(bounded.second(k) - runge.evaluate(bounded.first.points.col(k))) <= 0.2);

    // Identical seeds reproduce the dataset bit-exactly.
    const auto again = sample_dataset(runge, uniform, 100, NoiseSpec{}, 5);
    REQUIRE(again.first.points == clean.first.points);
    REQUIRE(again.second == clean.second);
}

TEST_CASE("mixture sampling has the summed variance") {
    const TargetFunction& ishigami = target_by_name("ishigami");
    const PointSpec mixture{PointLaw::Mixture, 1.0, -M_PI, M_PI, 0.1};
    const auto data = sample_dataset(ishigami, mixture, 34000, NoiseSpec{}, 8);
    const auto& pts = data.first.points;  // 3 x m -> ~1e5 coordinates
    const double mean = pts.mean();
    double var = 0.0;
    for (Eigen::Index k = 0; k < pts.cols(); ++k)
        for (Eigen::Index i = 0; i < pts.rows(); ++i)
            var += (pts(i, k) - mean) * (pts(i, k) - mean);
    var /= static_cast<double>(pts.size() - 1);
    const double expected = M_PI * M_PI / 3.0 + 0.01;
    REQUIRE(var == Catch::Approx(expected).epsilon(0.02));
}

TEST_CASE("best-fit coefficients on the gaussian fixture") {
    const auto fx = gaussian_bump_fixture(1.0, 1.0);
    REQUIRE(fx.rho_norm == 1.0);

    SamplingConfig cfg;
    cfg.dim = 1;
    cfg.n_features = 64;
    cfg.sigma = fx.sigma_rho;
    cfg.seed = 12;
    const WeightSet ws = draw_dense_weights(cfg);

    const auto alpha = [&fx](const Eigen::VectorXd& w) { return fx.alpha(w(0)); };
    const auto rho = [&fx](const Eigen::VectorXd& w) { return fx.rho(w(0)); };
    const Eigen::VectorXcd c = best_fit_coefficients(alpha, rho, ws);
    for (int j = 0; j < 64; ++j)
        REQUIRE(std::abs(c(j)) == Catch::Approx(1.0 / 64.0).margin(1e-15));

    // |c*_j| <= ||f||_rho / N for a fixture with sigma_rho > 1/sigma_f.
    const auto fx2 = gaussian_bump_fixture(1.3, 1.1);
    SamplingConfig cfg2 = cfg;
    cfg2.sigma = fx2.sigma_rho;
    const WeightSet ws2 = draw_dense_weights(cfg2);
    const Eigen::VectorXcd c2 = best_fit_coefficients(
        [&fx2](const Eigen::VectorXd& w) { return fx2.alpha(w(0)); },
        [&fx2](const Eigen::VectorXd& w) { return fx2.rho(w(0)); }, ws2);
    for (int j = 0; j < 64; ++j)
        REQUIRE(std::abs(c2(j)) <= fx2.rho_norm / 64.0 + 1e-15);
}

TEST_CASE("gaussian fixture transform integrates back to the target") {
    const auto fx = gaussian_bump_fixture(1.0, 1.0);
    // f(x) = integral alpha(w) exp(i w x) dw, checked by trapezoid quadrature.
    for (double x : {0.0, 0.4, -1.2, 2.0}) {
        Complex acc = 0.0;
        const int n = 4001;
        const double lo = -12.0, hi = 12.0;
        const double h = (hi - lo) / (n - 1);
        for (int i = 0; i < n; ++i) {
            const double w = lo + i * h;
            const double weight = (i == 0 || i == n - 1) ? 0.5 : 1.0;
            acc += weight * fx.alpha(w) * Complex(std::cos(w * x), std::sin(w * x));
        }
        acc *= h;
        REQUIRE(acc.real() == Catch::Approx(fx.evaluate(x)).margin(1e-8));
        REQUIRE(std::abs(acc.imag()) < 1e-10);
    }
}

TEST_CASE("best-fit expansion is an unbiased estimate of the target") {
    const auto fx = gaussian_bump_fixture(1.0, 1.0);
    const int n_draws = 200;
    const int n_features = 32;
    const std::vector<double> xs = {-2.0, -1.5, -1.0, -0.5, -0.1, 0.0, 0.3, 0.8, 1.4, 2.2};

    std::vector<std::vector<double>> samples(xs.size());
    for (int rep = 0; rep < n_draws; ++rep) {
        SamplingConfig cfg;
        cfg.dim = 1;
        cfg.n_features = n_features;
        cfg.sigma = 1.0;
        cfg.seed = 5000 + static_cast<std::uint64_t>(rep);
        const WeightSet ws = draw_dense_weights(cfg);
        const Eigen::VectorXcd c = best_fit_coefficients(
            [&fx](const Eigen::VectorXd& w) { return fx.alpha(w(0)); },
            [&fx](const Eigen::VectorXd& w) { return fx.rho(w(0)); }, ws);
        for (std::size_t xi = 0; xi < xs.size(); ++xi) {
            Complex val = 0.0;
            for (int j = 0; j < n_features; ++j) {
                const double t = ws.weights(0, j) * xs[xi];
                val += c(j) * Complex(std::cos(t), std::sin(t));
            }
            samples[xi].push_back(val.real());
        }
    }
    for (std::size_t xi = 0; xi < xs.size(); ++xi) {
        double mean = 0.0;
        for (double v : samples[xi]) mean += v;
        mean /= n_draws;
        double var = 0.0;
        for (double v : samples[xi]) var += (v - mean) * (v - mean);
        var /= (n_draws - 1);
        const double se = std::sqrt(var / n_draws);
        REQUIRE(std::abs(mean - fx.evaluate(xs[xi])) <= 3.0 * se + 1e-12);
    }
}

TEST_CASE("order-q best-fit coefficients select matching supports") {
    // f(x) = (1/2)(g(x_1) + g(x_2)) with g the gaussian bump; d = 3, q = 1.
    const auto fx = gaussian_bump_fixture(1.0, 1.0);
    SamplingConfig cfg;
    cfg.dim = 3;
    cfg.q = 1;
    cfg.n_per_subset = 8;
    cfg.scheme = SamplingScheme::Complete;
    cfg.sigma = 1.0;
    cfg.seed = 9;
    const WeightSet ws = draw_complete_sparse_weights(cfg);

    std::vector<OrderQTransformTerm> terms;
    terms.push_back({{0}, [&fx](const Eigen::VectorXd& w) { return fx.alpha(w(0)); }});
    terms.push_back({{1}, [&fx](const Eigen::VectorXd& w) { return fx.alpha(w(0)); }});
    const auto rho_q = [&fx](const Eigen::VectorXd& w) { return fx.rho(w(0)); };

    const Eigen::VectorXcd c = best_fit_coefficients_order_q(terms, rho_q, ws, cfg.n_per_subset);
    REQUIRE(c.size() == 24);
    for (int j = 0; j < 24; ++j) {
        const auto& support = ws.supports[static_cast<std::size_t>(j)];
        if (support == std::vector<int>{2}) {
            REQUIRE(std::abs(c(j)) == 0.0);  // no term lives on x_3
        } else {
            // K = 2 terms, n = 8 per subset, constant ratio 1: |c| = 1/(2*8).
            REQUIRE(std::abs(c(j)) == Catch::Approx(1.0 / 16.0).margin(1e-15));
        }
    }
}

TEST_CASE("best-fit feasibility for the theory eta in most seeded trials") {
    const auto fx = gaussian_bump_fixture(1.0, 1.0);
    const double epsilon = 0.2;
    const double eta = eta_from_theory(epsilon, fx.rho_norm, 0.0);
    const int n_features = 248;  // Lemma-1 bound at eps = 0.2, delta = 0.1
    const int m = 200;

    int feasible = 0;
    const int trials = 50;
    for (int t = 0; t < trials; ++t) {
        SamplingConfig cfg;
        cfg.dim = 1;
        cfg.n_features = n_features;
        cfg.sigma = 1.0;
        cfg.seed = 40000 + static_cast<std::uint64_t>(t);
        const WeightSet ws = draw_dense_weights(cfg);
        const Eigen::VectorXcd c = best_fit_coefficients(
            [&fx](const Eigen::VectorXd& w) { return fx.alpha(w(0)); },
            [&fx](const Eigen::VectorXd& w) { return fx.rho(w(0)); }, ws);

        Rng rng(41000 + static_cast<std::uint64_t>(t));
        PointSet pts;
        pts.points.resize(1, m);
        Eigen::VectorXcd y(m);
        for (int k = 0; k < m; ++k) {
            pts.points(0, k) = rng.normal();
            y(k) = fx.evaluate(pts.points(0, k));
        }
        const auto A = build_feature_matrix<Complex>(pts, ws, ActivationKind::ComplexExponential);
        if ((A.entries * c - y).norm() <= eta * std::sqrt(static_cast<double>(m))) ++feasible;
    }
    REQUIRE(feasible >= static_cast<int>(0.9 * trials));
}

TEST_CASE("run_experiment produces deterministic ordered reports") {
    ExperimentConfig cfg;
    cfg.name = "unit/runge";
    cfg.target = "runge";
    cfg.m = 40;
    cfg.eta = 0.02;
    cfg.points = PointSpec{PointLaw::Uniform, 1.0, -1.0, 1.0, 0.1};
    cfg.sampling.dim = 1;
    cfg.sampling.n_features = 100;
    cfg.sampling.sigma = M_PI;
    cfg.sampling.bias_range = {{0.0, 2.0 * M_PI}};
    cfg.seeds = {3, 1, 2};
    cfg.test_size = 200;

    const auto r1 = run_experiment(cfg);
    REQUIRE(r1.records.size() == 3);
    REQUIRE(r1.records[0].seed == 3);
    REQUIRE(r1.records[1].seed == 1);
    for (const auto& rec : r1.records) {
        REQUIRE_FALSE(rec.failed);
        REQUIRE(rec.test_error < 1.0);
        REQUIRE(rec.has_ols);
    }
    REQUIRE(r1.plot.has_value());
    REQUIRE(r1.plot->x.size() == 2000);

    // Rerun and parallel run agree modulo timing.
    auto r2 = run_experiment(cfg);
    ExperimentConfig par = cfg;
    par.jobs = 3;
    auto r3 = run_experiment(par);
    Json j1 = experiment_report_to_json(r1);
    Json j2 = experiment_report_to_json(r2);
    Json j3 = experiment_report_to_json(r3);
    strip_timing_fields(j1);
    strip_timing_fields(j2);
    strip_timing_fields(j3);
    j3["config"]["jobs"] = 1;  // the only intended difference
    REQUIRE(j1.dump() == j2.dump());
    REQUIRE(j1.dump() == j3.dump());
}

TEST_CASE("experiment presets expand") {
    REQUIRE(expand_preset("table1").size() == 24);
    REQUIRE(expand_preset("ishigami").size() == 3);
    REQUIRE(expand_preset("overfit-1d").size() == 1);
    REQUIRE(expand_preset("noise-1d").size() == 4);
    REQUIRE_THROWS_AS(expand_preset("nope"), ConfigError);

    const auto ish = make_ishigami_config(PointLaw::Uniform);
    REQUIRE(ish.sampling.n_per_subset * 3 == 3276);
    REQUIRE(ish.sampling.sigma == Catch::Approx(1.5 * M_PI));
}
