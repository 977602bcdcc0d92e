#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <vector>

#include "srfe/errors.hpp"
#include "srfe/feature_map.hpp"
#include "srfe/log.hpp"

namespace srfe {

template <typename Scalar>
using DenseMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using DenseVector = Eigen::Vector<Scalar, Eigen::Dynamic>;

struct SolverConfig {
    double eta = 0.0;        // stability parameter; the constraint radius is eta * sqrt(m)
    int max_iters = 20000;
    double abs_tol = 1e-7;
    double rel_tol = 1e-5;
    double penalty = 1.0;    // initial augmented-Lagrangian parameter
    double zero_tol = 1e-8;  // magnitude threshold when reporting sparsity

    void validate() const {
        if (eta < 0.0) throw ConfigError("solver: eta must be >= 0");
        if (max_iters < 1) throw ConfigError("solver: max_iters must be >= 1");
        if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) throw ConfigError("solver: tolerances must be > 0");
        if (!(penalty > 0.0)) throw ConfigError("solver: penalty must be > 0");
        if (!(zero_tol > 0.0)) throw ConfigError("solver: zero_tol must be > 0");
    }
};

struct SolveReport {
    int iterations = 0;
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    double feasibility_gap = 0.0;  // ||A c - y|| - eta sqrt(m); <= 0 when inside the ball
    double objective = 0.0;        // ||c||_1
    int sparsity = 0;              // entries with magnitude > zero_tol
    bool converged = false;
};

struct KktCertificate {
    double feasibility_violation = 0.0;  // (||y - A c|| - radius)_+
    double alignment_violation = 0.0;    // on-support mismatch between A^H r and sign/phase of c
    double dual_violation = 0.0;         // off-support subgradient magnitude excess
    double slackness_violation = 0.0;    // |constraint slack| when the multiplier is active
    double lambda = 0.0;                 // multiplier estimate
    double max_violation = 0.0;
};

template <typename Scalar>
int count_nonzero(const DenseVector<Scalar>& c, double zero_tol) {
    int n = 0;
    for (Eigen::Index j = 0; j < c.size(); ++j)
        if (std::abs(c(j)) > zero_tol) ++n;
    return n;
}

namespace detail {

template <typename Scalar>
Scalar shrink(const Scalar& v, double kappa) {
    const double mag = std::abs(v);
    if (mag <= kappa) return Scalar(0);
    return v * Scalar((mag - kappa) / mag);
}

// Smallest achievable residual min_c ||A c - y|| given the row Gram A A^H.
// A Cholesky success certifies full row rank (residual 0); otherwise the Gram
// eigenbasis gives the projection onto range(A).
template <typename Scalar>
double min_residual_from_row_gram(const DenseMatrix<Scalar>& row_gram,
                                  const DenseVector<Scalar>& y) {
    Eigen::LLT<DenseMatrix<Scalar>> llt(row_gram);
    if (llt.info() == Eigen::Success) return 0.0;
    Eigen::SelfAdjointEigenSolver<DenseMatrix<Scalar>> eig(row_gram);
    const double tol = std::max(1e-280, eig.eigenvalues().maxCoeff()) * 1e-12 *
                       static_cast<double>(row_gram.rows());
    double out_of_range_sq = 0.0;
    const DenseVector<Scalar> proj = eig.eigenvectors().adjoint() * y;
    for (Eigen::Index i = 0; i < proj.size(); ++i)
        if (eig.eigenvalues()(i) <= tol) out_of_range_sq += std::norm(proj(i));
    return std::sqrt(std::max(0.0, out_of_range_sq));
}

/// Smallest achievable residual min_c ||A c - y||.
template <typename Scalar>
double min_residual(const DenseMatrix<Scalar>& A, const DenseVector<Scalar>& y) {
    if (A.rows() > A.cols()) {
        Eigen::CompleteOrthogonalDecomposition<DenseMatrix<Scalar>> cod(A);
        return (y - A * cod.solve(y)).norm();
    }
    return min_residual_from_row_gram<Scalar>((A * A.adjoint()).eval(), y);
}

// Exact Euclidean projection of c0 onto {c : ||A c - y|| <= radius}, assumed
// nonempty beyond the minimum residual. The projection is c(mu) =
// (I + mu A^H A)^{-1} (c0 + mu A^H y); the scalar mu solves
// ||A c(mu) - y|| = radius, located by bisection on the monotone residual using
// the eigendecomposition of the smaller Gram matrix. `gram` must be A A^H when
// m <= N and A^H A otherwise.
template <typename Scalar>
DenseVector<Scalar> project_to_residual_ball(const DenseMatrix<Scalar>& A,
                                             const DenseVector<Scalar>& y,
                                             const DenseVector<Scalar>& c0, double radius,
                                             const DenseMatrix<Scalar>& gram) {
    const DenseVector<Scalar> rho0 = A * c0 - y;
    if (rho0.norm() <= radius) return c0;

    const bool wide = A.rows() <= A.cols();
    const double rank_tol = 1e-12;

    if (wide) {
        Eigen::SelfAdjointEigenSolver<DenseMatrix<Scalar>> eig(gram);
        const Eigen::VectorXd lam = eig.eigenvalues();
        const DenseVector<Scalar> rt = eig.eigenvectors().adjoint() * rho0;
        const double lam_tol = std::max(lam.maxCoeff(), 1.0) * rank_tol;

        auto residual_at = [&](double mu) {
            double s = 0.0;
            for (Eigen::Index i = 0; i < lam.size(); ++i) {
                const double den = 1.0 + mu * lam(i);
                s += std::norm(rt(i)) / (den * den);
            }
            return std::sqrt(s);
        };
        auto point_at = [&](double mu) -> DenseVector<Scalar> {
            DenseVector<Scalar> scaled = rt;
            for (Eigen::Index i = 0; i < lam.size(); ++i) scaled(i) /= Scalar(1.0 + mu * lam(i));
            return c0 - mu * (A.adjoint() * (eig.eigenvectors() * scaled));
        };
        if (radius <= 0.0) {
            DenseVector<Scalar> scaled = rt;
            for (Eigen::Index i = 0; i < lam.size(); ++i)
                scaled(i) = lam(i) > lam_tol ? scaled(i) / Scalar(lam(i)) : Scalar(0);
            return c0 - A.adjoint() * (eig.eigenvectors() * scaled);
        }
        double hi = 1.0;
        for (int i = 0; i < 200 && residual_at(hi) > radius; ++i) hi *= 2.0;
        double lo = 0.0;
        for (int i = 0; i < 200; ++i) {
            const double mid = 0.5 * (lo + hi);
            (residual_at(mid) > radius ? lo : hi) = mid;
        }
        return point_at(hi);
    }

    Eigen::SelfAdjointEigenSolver<DenseMatrix<Scalar>> eig(gram);
    const Eigen::VectorXd lam = eig.eigenvalues();
    const DenseVector<Scalar> aty = A.adjoint() * rho0;
    const DenseVector<Scalar> t = eig.eigenvectors().adjoint() * aty;
    const double lam_tol = std::max(lam.maxCoeff(), 1.0) * rank_tol;
    const double rho0_sq = rho0.squaredNorm();

    auto residual_at = [&](double mu) {
        double s = rho0_sq;
        for (Eigen::Index i = 0; i < lam.size(); ++i) {
            const double den = 1.0 + mu * lam(i);
            s += -2.0 * mu * std::norm(t(i)) / den +
                 mu * mu * lam(i) * std::norm(t(i)) / (den * den);
        }
        return std::sqrt(std::max(0.0, s));
    };
    auto point_at = [&](double mu) -> DenseVector<Scalar> {
        DenseVector<Scalar> scaled = t;
        for (Eigen::Index i = 0; i < lam.size(); ++i)
            scaled(i) *= Scalar(lam(i) / (1.0 + mu * lam(i)));
        return c0 - mu * (aty - mu * (eig.eigenvectors() * scaled));
    };
    if (radius <= 0.0) {
        DenseVector<Scalar> scaled = t;
        for (Eigen::Index i = 0; i < lam.size(); ++i)
            scaled(i) = lam(i) > lam_tol ? scaled(i) / Scalar(lam(i)) : Scalar(0);
        return c0 - eig.eigenvectors() * scaled;
    }
    double hi = 1.0;
    for (int i = 0; i < 200 && residual_at(hi) > radius; ++i) hi *= 2.0;
    double lo = 0.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (residual_at(mid) > radius ? lo : hi) = mid;
    }
    return point_at(hi);
}

}  // namespace detail

template <typename Scalar>
struct BpdnResult {
    DenseVector<Scalar> coefficients;
    SolveReport report;
};

// min ||c||_1  s.t.  ||A c - y|| <= eta sqrt(m)
//
// ADMM on the consensus splitting [I; A] c = [w; z] with the l1 prox on w
// (complex case: magnitude shrinkage, phase preserved) and the exact ball
// projection on z. The c-update solves (I + A^H A) c = rhs through one cached
// Cholesky factorization of the smaller Gram matrix; the system is independent
// of the penalty, so residual balancing rescales the penalty without
// refactoring. A converged iterate is polished by an exact projection onto the
// residual ball, which makes the feasibility contract sharp.
template <typename Scalar>
BpdnResult<Scalar> solve_bpdn(const DenseMatrix<Scalar>& A, const DenseVector<Scalar>& y,
                              const SolverConfig& config) {
    config.validate();
    if (A.rows() != y.size()) throw ShapeError("solve_bpdn: y length != matrix rows");

    const Eigen::Index m = A.rows();
    const Eigen::Index n = A.cols();
    const double radius = config.eta * std::sqrt(static_cast<double>(m));

    BpdnResult<Scalar> result;
    result.coefficients = DenseVector<Scalar>::Zero(n);

    // c = 0 is feasible and has the minimal objective.
    if (y.norm() <= radius) {
        result.report.converged = true;
        result.report.feasibility_gap = y.norm() - radius;
        return result;
    }

    // One Gram product serves the feasibility check, the cached factorization,
    // and the final exact projection.
    const bool wide = m <= n;
    DenseMatrix<Scalar> gram = wide ? (A * A.adjoint()).eval() : (A.adjoint() * A).eval();

    const double r_min = wide ? detail::min_residual_from_row_gram<Scalar>(gram, y)
                              : detail::min_residual<Scalar>(A, y);
    if (r_min > radius + 1e-10 * std::max(1.0, y.norm()))
        throw InfeasibleError(r_min, radius);

    Eigen::LLT<DenseMatrix<Scalar>> llt;
    {
        DenseMatrix<Scalar> k = gram;
        k.diagonal().array() += Scalar(1);
        llt.compute(k);
    }

    auto solve_normal = [&](const DenseVector<Scalar>& rhs) -> DenseVector<Scalar> {
        if (wide) return rhs - A.adjoint() * llt.solve(A * rhs);
        return llt.solve(rhs);
    };
    auto project_ball = [&](const DenseVector<Scalar>& p) -> DenseVector<Scalar> {
        const double dist = (p - y).norm();
        if (dist <= radius) return p;
        return y + (p - y) * Scalar(radius / dist);
    };

    constexpr double kRelax = 1.5;
    double rho = config.penalty;

    DenseVector<Scalar> c = DenseVector<Scalar>::Zero(n);
    DenseVector<Scalar> w = DenseVector<Scalar>::Zero(n);
    DenseVector<Scalar> z = project_ball(DenseVector<Scalar>::Zero(m));
    DenseVector<Scalar> u1 = DenseVector<Scalar>::Zero(n);
    DenseVector<Scalar> u2 = DenseVector<Scalar>::Zero(m);
    DenseVector<Scalar> ac = DenseVector<Scalar>::Zero(m);

    SolveReport rep;
    int it = 0;
    for (; it < config.max_iters; ++it) {
        c = solve_normal((w - u1) + A.adjoint() * (z - u2));
        ac = A * c;

        const DenseVector<Scalar> w_prev = w;
        const DenseVector<Scalar> z_prev = z;
        const DenseVector<Scalar> ch = kRelax * c + (1.0 - kRelax) * w_prev;
        const DenseVector<Scalar> ah = kRelax * ac + (1.0 - kRelax) * z_prev;

        DenseVector<Scalar> wu = ch + u1;
        for (Eigen::Index j = 0; j < n; ++j) w(j) = detail::shrink(wu(j), 1.0 / rho);
        z = project_ball(ah + u2);
        u1 += ch - w;
        u2 += ah - z;

        const double r_pri = std::sqrt((c - w).squaredNorm() + (ac - z).squaredNorm());
        const double r_dual =
            rho * ((w - w_prev) + A.adjoint() * (z - z_prev)).norm();
        const double eps_pri =
            std::sqrt(static_cast<double>(n + m)) * config.abs_tol +
            config.rel_tol * std::max(std::sqrt(c.squaredNorm() + ac.squaredNorm()),
                                      std::sqrt(w.squaredNorm() + z.squaredNorm()));
        const double eps_dual = std::sqrt(static_cast<double>(n)) * config.abs_tol +
                                config.rel_tol * rho * (u1 + A.adjoint() * u2).norm();

        rep.primal_residual = r_pri;
        rep.dual_residual = r_dual;
        if (r_pri <= eps_pri && r_dual <= eps_dual) {
            rep.converged = true;
            ++it;
            break;
        }

        // Residual balancing; the c-update system does not depend on rho.
        if ((it + 1) % 25 == 0) {
            if (r_pri > 10.0 * r_dual && rho < 1e8) {
                rho *= 2.0;
                u1 /= Scalar(2);
                u2 /= Scalar(2);
            } else if (r_dual > 10.0 * r_pri && rho > 1e-8) {
                rho /= 2.0;
                u1 *= Scalar(2);
                u2 *= Scalar(2);
            }
        }
    }
    rep.iterations = it;

    double res_norm = (ac - y).norm();
    if (res_norm > radius) {
        c = detail::project_to_residual_ball(A, y, c, radius, gram);
        res_norm = (A * c - y).norm();
    }
    rep.feasibility_gap = res_norm - radius;
    rep.objective = c.template lpNorm<1>();
    rep.sparsity = count_nonzero<Scalar>(c, config.zero_tol);
    result.coefficients = std::move(c);
    result.report = rep;
    return result;
}

// Optimality check for the solved ball-constrained program. With residual
// r = y - A c and an active constraint, A^H r must align with the sign (phase)
// of c on its support after scaling by the multiplier, and stay subunit off the
// support. For radius ~ 0 the residual direction is meaningless, so a dual
// vector is fitted by least squares on the support instead (the equality-
// constrained certificate). Violations are returned as data, not errors.
template <typename Scalar>
KktCertificate verify_kkt(const DenseMatrix<Scalar>& A, const DenseVector<Scalar>& y,
                          const DenseVector<Scalar>& c, double radius,
                          double support_tol = -1.0) {
    if (A.rows() != y.size() || A.cols() != c.size())
        throw ShapeError("verify_kkt: dimension mismatch");

    KktCertificate cert;
    const DenseVector<Scalar> resid = y - A * c;
    const double res_norm = resid.norm();
    cert.feasibility_violation = std::max(0.0, res_norm - radius);

    const double c_max = c.size() > 0 ? c.template lpNorm<Eigen::Infinity>() : 0.0;
    if (support_tol < 0.0) support_tol = std::max(1e-8, 1e-5 * c_max);

    std::vector<Eigen::Index> support;
    for (Eigen::Index j = 0; j < c.size(); ++j)
        if (std::abs(c(j)) > support_tol) support.push_back(j);

    if (support.empty()) {
        // c = 0 is optimal exactly when it is feasible.
        cert.max_violation = cert.feasibility_violation;
        return cert;
    }

    const double zero_radius = 1e-12 * std::max(1.0, y.norm());
    if (radius > zero_radius) {
        const DenseVector<Scalar> g = A.adjoint() * resid;
        const double g_max = g.template lpNorm<Eigen::Infinity>();
        cert.lambda = g_max;
        if (g_max > 0.0) {
            for (Eigen::Index j = 0; j < c.size(); ++j) {
                const Scalar gj = g(j) / Scalar(g_max);
                if (std::abs(c(j)) > support_tol) {
                    const Scalar phase = c(j) / Scalar(std::abs(c(j)));
                    cert.alignment_violation =
                        std::max(cert.alignment_violation, std::abs(gj - phase));
                } else {
                    cert.dual_violation =
                        std::max(cert.dual_violation, std::max(0.0, std::abs(gj) - 1.0));
                }
            }
        }
        // c != 0 requires an active constraint at the optimum.
        cert.slackness_violation = std::abs(res_norm - radius);
    } else {
        // Equality-constrained case: fit v with A_S^H v = sign(c_S).
        const auto s_count = static_cast<Eigen::Index>(support.size());
        DenseMatrix<Scalar> ash(s_count, A.rows());
        DenseVector<Scalar> sgn(s_count);
        for (Eigen::Index i = 0; i < s_count; ++i) {
            ash.row(i) = A.col(support[static_cast<std::size_t>(i)]).adjoint();
            const Scalar cj = c(support[static_cast<std::size_t>(i)]);
            sgn(i) = cj / Scalar(std::abs(cj));
        }
        Eigen::CompleteOrthogonalDecomposition<DenseMatrix<Scalar>> cod(ash);
        const DenseVector<Scalar> v = cod.solve(sgn);
        const DenseVector<Scalar> u = A.adjoint() * v;
        cert.lambda = v.norm();
        for (Eigen::Index i = 0; i < s_count; ++i)
            cert.alignment_violation =
                std::max(cert.alignment_violation, std::abs(u(support[static_cast<std::size_t>(i)]) - sgn(i)));
        for (Eigen::Index j = 0; j < c.size(); ++j)
            if (std::abs(c(j)) <= support_tol)
                cert.dual_violation =
                    std::max(cert.dual_violation, std::max(0.0, std::abs(u(j)) - 1.0));
        cert.slackness_violation = cert.feasibility_violation;
    }

    cert.max_violation = std::max({cert.feasibility_violation, cert.alignment_violation,
                                   cert.dual_violation, cert.slackness_violation});
    return cert;
}

/// Minimum-norm least-squares solution via a rank-revealing factorization.
template <typename Scalar>
DenseVector<Scalar> least_squares(const DenseMatrix<Scalar>& A, const DenseVector<Scalar>& y) {
    if (A.rows() != y.size()) throw ShapeError("least_squares: y length != matrix rows");
    Eigen::CompleteOrthogonalDecomposition<DenseMatrix<Scalar>> cod(A);
    return cod.solve(y);
}

/// Keeps the s largest-magnitude entries (ties broken by lowest index), zeroes
/// the rest. s above the length is clamped with a warning.
template <typename Scalar>
DenseVector<Scalar> prune_top_s(const DenseVector<Scalar>& c, int s) {
    const auto n = c.size();
    if (s < 0) throw ConfigError("prune_top_s: s must be >= 0");
    if (s > n) {
        log::warn("prune_top_s: s=" + std::to_string(s) + " exceeds length " +
                  std::to_string(n) + ", clamping");
        s = static_cast<int>(n);
    }
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        const double ma = std::abs(c(a));
        const double mb = std::abs(c(b));
        if (ma != mb) return ma > mb;
        return a < b;
    });
    DenseVector<Scalar> out = DenseVector<Scalar>::Zero(n);
    for (int k = 0; k < s; ++k) out(order[static_cast<std::size_t>(k)]) = c(order[static_cast<std::size_t>(k)]);
    return out;
}

// FeatureMatrix convenience overloads.
template <typename Scalar>
BpdnResult<Scalar> solve_bpdn(const FeatureMatrix<Scalar>& A, const DenseVector<Scalar>& y,
                              const SolverConfig& config) {
    return solve_bpdn<Scalar>(A.entries, y, config);
}

template <typename Scalar>
DenseVector<Scalar> least_squares(const FeatureMatrix<Scalar>& A, const DenseVector<Scalar>& y) {
    return least_squares<Scalar>(A.entries, y);
}

}  // namespace srfe
