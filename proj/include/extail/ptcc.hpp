#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "extail/common.hpp"
#include "extail/tla.hpp"
#include "extail/tpdm.hpp"

// Partial tail-covariance/correlation via Schur complements, residual-based
// exceedance estimation, and the separation hypothesis test.

namespace extail {

namespace detail {

/// Continued fraction for the regularized incomplete beta (modified Lentz).
inline double beta_cont_frac(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = 3e-16;
    constexpr double kTiny = 1e-300;
    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps) break;
    }
    return h;
}

inline double reg_inc_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double log_beta =
        std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(log_beta);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cont_frac(a, b, x) / a;
    return 1.0 - front * beta_cont_frac(b, a, 1.0 - x) / b;
}

/// Two-sided p-value of a Student-t statistic with df degrees of freedom.
inline double student_t_two_sided_p(double t, double df) {
    if (!std::isfinite(t)) return 0.0;
    return reg_inc_beta(0.5 * df, 0.5, df / (df + t * t));
}

}  // namespace detail

struct PartialTailResult {
    Eigen::Matrix2d partial_cov;  // Sigma_{ij|S}
    double gamma = 0.0;           // normalized (1,2) entry
};

struct SeparationTestResult {
    double statistic = 0.0;  // t statistic
    double p_value = 1.0;
    long exceedances = 0;  // N' used by the residual estimator
    int cond_size = 0;     // |S|
    bool reject = false;
    double sigma_hat = 0.0;  // sigma_{ij|S} estimate
    double mass_hat = 0.0;   // m' estimate
    double gamma = 0.0;      // partial tail-correlation estimate
    double alpha = 0.0;      // significance level the decision used
};

namespace detail {

inline void check_ptcc_indices(Eigen::Index p, int i, int j, const std::vector<int>& cond) {
    if (i < 0 || j < 0 || i >= p || j >= p) throw InputError("partial tail: index out of range");
    if (i == j) throw InputError("partial tail: i and j must differ");
    for (int s : cond) {
        if (s < 0 || s >= p) throw InputError("partial tail: conditioning index out of range");
        if (s == i || s == j) throw InputError("partial tail: conditioning set overlaps {i,j}");
    }
}

inline double normalized_gamma(double c11, double c12, double c22) {
    const double denom = std::sqrt(std::max(c11, 0.0) * std::max(c22, 0.0));
    if (!(denom > 0.0)) return 0.0;
    return std::clamp(c12 / denom, -1.0, 1.0);
}

}  // namespace detail

/// Schur complement  Sigma_{ij|S} = Sigma_{ij,ij} - Sigma_{ij,S} Sigma_{S,S}^{-1} Sigma_{S,ij}
/// and the partial tail-correlation gamma_{ij|S}.
inline PartialTailResult partial_tail_cov(const Tpdm& tpdm, int i, int j,
                                          const std::vector<int>& cond) {
    const Eigen::Index p = tpdm.p();
    detail::check_ptcc_indices(p, i, j, cond);
    const auto s = static_cast<Eigen::Index>(cond.size());

    Eigen::Matrix2d block;
    block << tpdm.sigma(i, i), tpdm.sigma(i, j), tpdm.sigma(j, i), tpdm.sigma(j, j);
    if (s > 0) {
        Eigen::MatrixXd cross(2, s);  // Sigma_{ij,S}
        Eigen::MatrixXd ss(s, s);     // Sigma_{S,S}
        for (Eigen::Index a = 0; a < s; ++a) {
            cross(0, a) = tpdm.sigma(i, cond[static_cast<std::size_t>(a)]);
            cross(1, a) = tpdm.sigma(j, cond[static_cast<std::size_t>(a)]);
            for (Eigen::Index b = 0; b < s; ++b)
                ss(a, b) = tpdm.sigma(cond[static_cast<std::size_t>(a)],
                                      cond[static_cast<std::size_t>(b)]);
        }
        const Eigen::LLT<Eigen::MatrixXd> llt(ss);
        if (llt.info() != Eigen::Success) throw ConditioningSetError(cond);
        block -= cross * llt.solve(cross.transpose());
    }
    PartialTailResult out;
    out.partial_cov = block;
    out.gamma = detail::normalized_gamma(block(0, 0), block(0, 1), block(1, 1));
    return out;
}

namespace detail {

/// Residuals of t^{-1}(X_{ij}) after regressing out t^{-1}(X_S) with the
/// coefficient matrix Sigma_{ij,S} Sigma_{S,S}^{-1} read from `tpdm`.
/// `tinv` holds the precomputed t^{-1} of the sample matrix.
inline Eigen::MatrixXd residuals_from_tinv(const Eigen::MatrixXd& tinv, int i, int j,
                                           const std::vector<int>& cond, const Tpdm& tpdm) {
    check_ptcc_indices(tpdm.p(), i, j, cond);
    const Eigen::Index n = tinv.rows();
    const auto s = static_cast<Eigen::Index>(cond.size());
    Eigen::MatrixXd eps(n, 2);
    eps.col(0) = tinv.col(i);
    eps.col(1) = tinv.col(j);
    if (s == 0) return eps;

    Eigen::MatrixXd cross(2, s);
    Eigen::MatrixXd ss(s, s);
    for (Eigen::Index a = 0; a < s; ++a) {
        cross(0, a) = tpdm.sigma(i, cond[static_cast<std::size_t>(a)]);
        cross(1, a) = tpdm.sigma(j, cond[static_cast<std::size_t>(a)]);
        for (Eigen::Index b = 0; b < s; ++b)
            ss(a, b) =
                tpdm.sigma(cond[static_cast<std::size_t>(a)], cond[static_cast<std::size_t>(b)]);
    }
    const Eigen::LLT<Eigen::MatrixXd> llt(ss);
    if (llt.info() != Eigen::Success) throw ConditioningSetError(cond);
    const Eigen::MatrixXd coef = llt.solve(cross.transpose()).transpose();  // 2 x s

    Eigen::MatrixXd cond_cols(n, s);
    for (Eigen::Index a = 0; a < s; ++a)
        cond_cols.col(a) = tinv.col(cond[static_cast<std::size_t>(a)]);
    eps.noalias() -= cond_cols * coef.transpose();
    return eps;
}

inline Eigen::MatrixXd tinv_of(const StandardizedMatrix& x) {
    Eigen::MatrixXd tinv(x.n(), x.p());
    for (Eigen::Index c = 0; c < x.p(); ++c)
        for (Eigen::Index r = 0; r < x.n(); ++r) tinv(r, c) = softplus_inv(x.data(r, c));
    return tinv;
}

struct ResidualMoments {
    double s11 = 0.0, s12 = 0.0, s22 = 0.0;  // angular second moments
    double mass = 0.0;                       // m' from the residual radii
    double threshold = 0.0;                  // r'_0
    long exceedances = 0;                    // N'
};

/// Exceedance moments of the residual pair: threshold at the q-quantile of
/// residual norms, then average e_a e_b / r^2 over exceedances. The residual
/// columns are mean-centered first; the location shift is asymptotically
/// negligible for the tail moment, and without it the moderate-radius rows
/// leak a spurious positive cross moment into the estimate.
inline ResidualMoments residual_moments(const Eigen::MatrixXd& eps, double q, int cond_size) {
    const Eigen::Index n = eps.rows();
    const double mu0 = eps.col(0).mean();
    const double mu1 = eps.col(1).mean();
    Eigen::VectorXd norms(n);
    for (Eigen::Index l = 0; l < n; ++l)
        norms[l] = std::hypot(eps(l, 0) - mu0, eps(l, 1) - mu1);
    const double r0 = select_threshold(norms, q);

    ResidualMoments m;
    m.threshold = r0;
    for (Eigen::Index l = 0; l < n; ++l) {
        if (!(norms[l] > r0)) continue;
        ++m.exceedances;
        const double e0 = eps(l, 0) - mu0;
        const double e1 = eps(l, 1) - mu1;
        const double inv_r2 = 1.0 / (norms[l] * norms[l]);
        m.s11 += e0 * e0 * inv_r2;
        m.s12 += e0 * e1 * inv_r2;
        m.s22 += e1 * e1 * inv_r2;
    }
    const long required = cond_size + 3;
    if (m.exceedances < required) throw InsufficientExceedances(m.exceedances, required);
    m.mass = r0 * r0 * static_cast<double>(m.exceedances) / static_cast<double>(n);
    return m;
}

/// Student-t test of gamma = 0 with df = N' - |S| - 2.
inline SeparationTestResult test_from_moments(const ResidualMoments& m, int cond_size,
                                              double alpha) {
    const long df = m.exceedances - cond_size - 2;
    if (df <= 0) throw EstimationError("ptcc_test: nonpositive degrees of freedom");
    const double scale = m.mass / static_cast<double>(m.exceedances);
    SeparationTestResult r;
    r.exceedances = m.exceedances;
    r.cond_size = cond_size;
    r.sigma_hat = scale * m.s12;
    r.mass_hat = m.mass;
    r.alpha = alpha;
    double gamma = normalized_gamma(m.s11, m.s12, m.s22);
    constexpr double kGammaCap = 1.0 - 1e-12;
    gamma = std::clamp(gamma, -kGammaCap, kGammaCap);
    r.gamma = gamma;
    r.statistic = gamma * std::sqrt(static_cast<double>(df) / (1.0 - gamma * gamma));
    r.p_value = student_t_two_sided_p(r.statistic, static_cast<double>(df));
    r.reject = r.p_value < alpha;
    return r;
}

}  // namespace detail

/// Residuals of the transformed pair after regressing out the conditioning
/// block, against a supplied TPDM estimate.
inline Eigen::MatrixXd tail_residuals(const StandardizedMatrix& x, int i, int j,
                                      const std::vector<int>& cond, const Tpdm& sigma_hat) {
    return detail::residuals_from_tinv(detail::tinv_of(x), i, j, cond, sigma_hat);
}

struct PartialCovEstimate {
    double sigma_hat = 0.0;
    double mass_hat = 0.0;
    long exceedances = 0;
};

/// One dataset, many tests: caches t^{-1}(X) and the global TPDM so repeated
/// (i, j, S) queries stay O(n). Immutable after construction.
class PtccContext {
public:
    PtccContext(StandardizedMatrix x, double q)
        : x_(std::move(x)), q_(q), tinv_(detail::tinv_of(x_)), global_(estimate_tpdm(x_, q)) {}

    const Tpdm& global_tpdm() const { return global_; }
    const StandardizedMatrix& sample() const { return x_; }
    double q() const { return q_; }
    Eigen::Index p() const { return x_.p(); }

    PartialCovEstimate estimate(int i, int j, const std::vector<int>& cond) const {
        const auto m = moments(i, j, cond);
        const double scale = m.mass / static_cast<double>(m.exceedances);
        return {scale * m.s12, m.mass, m.exceedances};
    }

    SeparationTestResult test(int i, int j, const std::vector<int>& cond, double alpha) const {
        if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("ptcc_test: alpha must lie in (0,1)");
        return detail::test_from_moments(moments(i, j, cond), static_cast<int>(cond.size()),
                                         alpha);
    }

private:
    detail::ResidualMoments moments(int i, int j, const std::vector<int>& cond) const {
        const Eigen::MatrixXd eps = detail::residuals_from_tinv(tinv_, i, j, cond, global_);
        return detail::residual_moments(eps, q_, static_cast<int>(cond.size()));
    }

    StandardizedMatrix x_;
    double q_;
    Eigen::MatrixXd tinv_;
    Tpdm global_;
};

/// Residual-based estimate of sigma_{ij|S}; estimates the global TPDM of X
/// internally. Prefer PtccContext when testing many triplets on one dataset.
inline PartialCovEstimate estimate_partial_tail_cov(const StandardizedMatrix& x, int i, int j,
                                                    const std::vector<int>& cond, double q) {
    return PtccContext(x, q).estimate(i, j, cond);
}

/// t-test of H0: X_i and X_j are partially tail-uncorrelated given S.
inline SeparationTestResult ptcc_test(const StandardizedMatrix& x, int i, int j,
                                      const std::vector<int>& cond, double q, double alpha) {
    return PtccContext(x, q).test(i, j, cond, alpha);
}

}  // namespace extail
