#include <catch2/catch_amalgamated.hpp>

#include <complex>

#include "oracles.hpp"
#include "srfe/bpdn.hpp"
#include "srfe/diagnostics.hpp"
#include "srfe/rng.hpp"

using namespace srfe;
using Complex = std::complex<double>;

namespace {

SolverConfig tight(double eta) {
    SolverConfig cfg;
    cfg.eta = eta;
    cfg.abs_tol = 1e-10;
    cfg.rel_tol = 1e-9;
    cfg.max_iters = 200000;
    return cfg;
}

Eigen::MatrixXd gaussian_matrix(int m, int n, std::uint64_t seed) {
    Rng rng(seed);
    Eigen::MatrixXd A(m, n);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) A(i, j) = rng.normal();
    return A;
}

}  // namespace

TEST_CASE("zero data gives the zero solution") {
    const Eigen::MatrixXd A = gaussian_matrix(5, 9, 1);
    const Eigen::VectorXd y = Eigen::VectorXd::Zero(5);
    const auto res = solve_bpdn<double>(A, y, tight(0.3));
    REQUIRE(res.coefficients.norm() == 0.0);
    REQUIRE(res.report.converged);
    REQUIRE(res.report.iterations == 0);
}

TEST_CASE("identity instance shrinks the active coordinate onto the ball") {
    // m = N = 3, y = (3,0,0), radius 1: the solution scales y's support down to
    // the constraint boundary. A 1-D sweep over c = (t,0,0) is the oracle.
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(3, 3);
    Eigen::VectorXd y(3);
    y << 3.0, 0.0, 0.0;
    const double radius = 1.0;
    const double eta = radius / std::sqrt(3.0);

    double best_obj = 1e300;
    for (int i = 0; i <= 400000; ++i) {
        const double t = i * 1e-5;
        if (std::abs(3.0 - t) <= radius) best_obj = std::min(best_obj, t);
    }
    REQUIRE(best_obj == Catch::Approx(2.0).margin(1e-4));

    const auto res = solve_bpdn<double>(A, y, tight(eta));
    REQUIRE(res.coefficients(0) == Catch::Approx(2.0).margin(1e-6));
    REQUIRE(std::abs(res.coefficients(1)) < 1e-10);
    REQUIRE(std::abs(res.coefficients(2)) < 1e-10);
    REQUIRE(res.report.objective == Catch::Approx(best_obj).margin(1e-4));
}

TEST_CASE("orthonormal columns at eta = 0 recover A^H y") {
    const Eigen::MatrixXd M = gaussian_matrix(6, 4, 7);
    const Eigen::MatrixXd Q = Eigen::HouseholderQR<Eigen::MatrixXd>(M).householderQ() *
                              Eigen::MatrixXd::Identity(6, 4);
    Eigen::VectorXd c0(4);
    c0 << 0.8, -1.2, 0.0, 2.0;
    const Eigen::VectorXd y = Q * c0;

    const auto res = solve_bpdn<double>(Q, y, tight(0.0));
    REQUIRE((res.coefficients - Q.transpose() * y).norm() < 1e-6);

    const Eigen::VectorXd oracle = oracles::bpdn_reference(Q, y, 1e-10);
    REQUIRE((res.coefficients - oracle).norm() < 1e-5);
}

TEST_CASE("objective matches the lasso-path reference on random instances") {
    Rng rng(100);
    for (int trial = 0; trial < 20; ++trial) {
        const int m = 8 + static_cast<int>(rng.uniform_below(13));   // <= 20
        const int n = m + static_cast<int>(rng.uniform_below(21));   // <= 40
        const Eigen::MatrixXd A = gaussian_matrix(m, n, 200 + trial);
        Eigen::VectorXd c0 = Eigen::VectorXd::Zero(n);
        for (int k = 0; k < 3; ++k) c0(static_cast<int>(rng.uniform_below(n))) = rng.normal();
        Eigen::VectorXd y = A * c0;
        for (int i = 0; i < m; ++i) y(i) += 0.05 * rng.normal();
        const double eta = 0.02 + 0.1 * rng.uniform01();

        const auto res = solve_bpdn<double>(A, y, tight(eta));
        REQUIRE(res.report.converged);
        const double radius = eta * std::sqrt(static_cast<double>(m));
        const Eigen::VectorXd ref = oracles::bpdn_reference(A, y, radius);
        const double obj_ref = ref.lpNorm<1>();
        REQUIRE(res.report.objective <= obj_ref * (1.0 + 1e-4) + 1e-8);
        REQUIRE(res.report.objective >= obj_ref * (1.0 - 1e-4) - 1e-8);
    }
}

TEST_CASE("feasibility holds on every converged solve") {
    Rng rng(55);
    for (int trial = 0; trial < 25; ++trial) {
        const int m = 5 + static_cast<int>(rng.uniform_below(30));
        const int n = 5 + static_cast<int>(rng.uniform_below(60));
        const Eigen::MatrixXd A = gaussian_matrix(m, n, 300 + trial);
        Eigen::VectorXd y(m);
        for (int i = 0; i < m; ++i) y(i) = rng.normal();
        const double eta = (m > n ? 1.0 : 0.1) + 0.3 * rng.uniform01();

        SolverConfig cfg;  // spec defaults
        cfg.eta = eta;
        try {
            const auto res = solve_bpdn<double>(A, y, cfg);
            const double radius = eta * std::sqrt(static_cast<double>(m));
            REQUIRE((A * res.coefficients - y).norm() <= radius + cfg.abs_tol);
        } catch (const InfeasibleError& e) {
            REQUIRE(e.min_residual > e.radius);
        }
    }
}

TEST_CASE("infeasible radius raises with the least-squares certificate") {
    const Eigen::MatrixXd A = gaussian_matrix(8, 3, 17);
    Eigen::VectorXd y(8);
    Rng rng(18);
    for (int i = 0; i < 8; ++i) y(i) = rng.normal() + 2.0;

    const Eigen::VectorXd ls = oracles::pinv_solve(A, y);
    const double r_min = (A * ls - y).norm();
    REQUIRE(r_min > 0.1);

    bool threw = false;
    try {
        solve_bpdn<double>(A, y, tight(r_min / (2.0 * std::sqrt(8.0))));
    } catch (const InfeasibleError& e) {
        threw = true;
        REQUIRE(e.min_residual == Catch::Approx(r_min).epsilon(1e-6));
    }
    REQUIRE(threw);
}

TEST_CASE("running out of iterations reports converged = false") {
    const Eigen::MatrixXd A = gaussian_matrix(10, 30, 23);
    Eigen::VectorXd y(10);
    Rng rng(24);
    for (int i = 0; i < 10; ++i) y(i) = rng.normal();
    SolverConfig cfg = tight(0.05);
    cfg.max_iters = 3;
    const auto res = solve_bpdn<double>(A, y, cfg);
    REQUIRE_FALSE(res.report.converged);
    REQUIRE(res.report.iterations == 3);
}

TEST_CASE("kkt certificate validates solutions and flags perturbations") {
    const Eigen::MatrixXd A = gaussian_matrix(20, 40, 42);
    Eigen::VectorXd c0 = Eigen::VectorXd::Zero(40);
    c0(4) = 1.5;
    c0(19) = -0.7;
    c0(33) = 0.4;
    Eigen::VectorXd y = A * c0;
    Rng rng(43);
    for (int i = 0; i < 20; ++i) y(i) += 0.02 * rng.normal();

    const double eta = 0.05;
    const auto res = solve_bpdn<double>(A, y, tight(eta));
    const double radius = eta * std::sqrt(20.0);
    const auto cert = verify_kkt<double>(A, y, res.coefficients, radius);
    REQUIRE(cert.max_violation < 1e-6);

    Eigen::VectorXd bad = res.coefficients;
    int zero_idx = -1;
    for (int j = 0; j < 40; ++j)
        if (std::abs(bad(j)) < 1e-10) {
            zero_idx = j;
            break;
        }
    REQUIRE(zero_idx >= 0);
    bad(zero_idx) += 0.1;
    const auto bad_cert = verify_kkt<double>(A, y, bad, radius);
    REQUIRE(bad_cert.max_violation > 0.05);

    // c = 0 is certified optimal whenever it is feasible.
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(40);
    const auto zero_cert = verify_kkt<double>(A, y, zero, y.norm() + 1.0);
    REQUIRE(zero_cert.max_violation == 0.0);
}

TEST_CASE("least squares: identity, consistent, and minimum-norm cases") {
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(4, 4);
    Eigen::VectorXd y(4);
    y << 1.0, -2.0, 0.5, 3.0;
    REQUIRE((least_squares<double>(I, y) - y).norm() < 1e-14);

    const Eigen::MatrixXd tall = gaussian_matrix(9, 4, 60);
    Eigen::VectorXd c0(4);
    c0 << 1.0, 2.0, -1.0, 0.3;
    const Eigen::VectorXd cons = least_squares<double>(tall, (tall * c0).eval());
    REQUIRE((tall * cons - tall * c0).norm() < 1e-10);

    for (int trial = 0; trial < 5; ++trial) {
        const Eigen::MatrixXd wide = gaussian_matrix(5, 8, 70 + trial);
        Eigen::VectorXd rhs(5);
        Rng rng(80 + trial);
        for (int i = 0; i < 5; ++i) rhs(i) = rng.normal();
        const Eigen::VectorXd via_cod = least_squares<double>(wide, rhs);
        const Eigen::VectorXd via_pinv = oracles::pinv_solve(wide, rhs);
        REQUIRE((via_cod - via_pinv).norm() < 1e-8);
    }
}

TEST_CASE("pruning keeps the s largest magnitudes with index tie-breaks") {
    Eigen::VectorXd c(4);
    c << 3.0, -1.0, 2.0, 0.0;
    const Eigen::VectorXd pruned = prune_top_s<double>(c, 2);
    Eigen::VectorXd expected(4);
    expected << 3.0, 0.0, 2.0, 0.0;
    REQUIRE(pruned == expected);

    REQUIRE(prune_top_s<double>(c, 4) == c);
    REQUIRE(prune_top_s<double>(c, 9) == c);  // clamped
    REQUIRE(prune_top_s<double>(c, 0).norm() == 0.0);

    Eigen::VectorXd ties(3);
    ties << 1.0, -1.0, 1.0;
    const Eigen::VectorXd kept = prune_top_s<double>(ties, 1);
    REQUIRE(kept(0) == 1.0);
    REQUIRE(kept(1) == 0.0);
    REQUIRE(kept(2) == 0.0);
}

TEST_CASE("pruning residual equals the best s-term error") {
    Rng rng(90);
    for (int trial = 0; trial < 10; ++trial) {
        const int n = 6 + static_cast<int>(rng.uniform_below(7));  // <= 12
        Eigen::VectorXd c(n);
        for (int j = 0; j < n; ++j) c(j) = rng.normal();
        const int s = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(n + 1)));
        const double tail = (c - prune_top_s<double>(c, s)).norm();
        REQUIRE(tail == Catch::Approx(best_s_term_error<double>(c, s, 2)).margin(1e-12));
        REQUIRE(tail == Catch::Approx(oracles::kappa_brute_force<double>(c, s, 2)).margin(1e-12));
    }
}

TEST_CASE("noiseless planted recovery under the coherence threshold") {
    // Random-row DFT matrix: low coherence, complex field.
    const int n = 64;
    const int m = 48;
    Rng rng(101);
    std::vector<int> rows(n);
    std::iota(rows.begin(), rows.end(), 0);
    for (int k = 0; k < m; ++k)
        std::swap(rows[static_cast<std::size_t>(k)],
                  rows[static_cast<std::size_t>(k + rng.uniform_below(static_cast<std::uint64_t>(n - k)))]);

    DenseMatrix<Complex> A(m, n);
    for (int k = 0; k < m; ++k)
        for (int j = 0; j < n; ++j) {
            const double phase = 2.0 * M_PI * rows[static_cast<std::size_t>(k)] * j / n;
            A(k, j) = Complex(std::cos(phase), std::sin(phase)) / std::sqrt(static_cast<double>(m));
        }

    const auto coh = mutual_coherence<Complex>(A);
    int s_max = 0;
    while (coh.mu <= coherence_threshold(s_max + 1)) ++s_max;
    REQUIRE(s_max >= 2);

    DenseVector<Complex> c0 = DenseVector<Complex>::Zero(n);
    c0(5) = Complex(1.0, 0.5);
    c0(40) = Complex(-0.8, 0.2);
    const DenseVector<Complex> y = A * c0;

    const auto res = solve_bpdn<Complex>(A, y, tight(0.0));
    REQUIRE((res.coefficients - c0).norm() < 1e-6);
}

TEST_CASE("solution scales with (y, eta)") {
    const Eigen::MatrixXd A = gaussian_matrix(12, 24, 110);
    Eigen::VectorXd y(12);
    Rng rng(111);
    for (int i = 0; i < 12; ++i) y(i) = rng.normal();
    const double eta = 0.1;
    const double t = 3.7;

    const auto base = solve_bpdn<double>(A, y, tight(eta));
    const auto scaled = solve_bpdn<double>(A, (t * y).eval(), tight(t * eta));
    REQUIRE((scaled.coefficients - t * base.coefficients).norm() <
            1e-5 * std::max(1.0, base.coefficients.norm() * t));
}

TEST_CASE("objective is monotone in the constraint radius") {
    const Eigen::MatrixXd A = gaussian_matrix(15, 30, 120);
    Eigen::VectorXd y(15);
    Rng rng(121);
    for (int i = 0; i < 15; ++i) y(i) = rng.normal();

    double prev = 1e300;
    for (double eta : {0.05, 0.1, 0.2, 0.4, 0.8}) {
        const auto res = solve_bpdn<double>(A, y, tight(eta));
        REQUIRE(res.report.objective <= prev + 1e-7);
        prev = res.report.objective;
    }
}

TEST_CASE("real instances agree across the real and complex paths") {
    const Eigen::MatrixXd A = gaussian_matrix(10, 20, 130);
    Eigen::VectorXd y(10);
    Rng rng(131);
    for (int i = 0; i < 10; ++i) y(i) = rng.normal();

    const auto real_res = solve_bpdn<double>(A, y, tight(0.15));
    const DenseMatrix<Complex> Ac = A.cast<Complex>();
    const DenseVector<Complex> yc = y.cast<Complex>();
    const auto cplx_res = solve_bpdn<Complex>(Ac, yc, tight(0.15));
    REQUIRE((cplx_res.coefficients - real_res.coefficients.cast<Complex>()).norm() < 1e-6);
}

TEST_CASE("sparsity reporting uses the zero tolerance") {
    Eigen::VectorXd c(4);
    c << 1.0, 1e-12, -0.5, 0.0;
    REQUIRE(count_nonzero<double>(c, 1e-8) == 2);
    REQUIRE(count_nonzero<double>(c, 1e-14) == 3);
}
