#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <vector>

#include "extail/common.hpp"

// Transformed-linear algebra on regularly varying scalars and vectors with
// tail index 2, plus heavy-tail sampling and marginal standardization.

namespace extail {

/// t(x) = log(1 + exp(x)), overflow-safe.
inline double softplus(double x) {
    if (x > 30.0) return x + std::log1p(std::exp(-x));
    return std::log1p(std::exp(x));
}

/// t^{-1}(y) = log(exp(y) - 1) for y > 0, underflow-safe.
inline double softplus_inv(double y) {
    if (!(y > 0.0)) throw InputError("softplus_inv: argument must be positive");
    if (y > 30.0) return y + std::log1p(-std::exp(-y));
    return std::log(std::expm1(y));
}

/// x (+) y = t(t^{-1}(x) + t^{-1}(y))
inline double tl_add(double x, double y) {
    return softplus(softplus_inv(x) + softplus_inv(y));
}

/// a (*) x = t(a t^{-1}(x))
inline double tl_scale(double a, double x) {
    if (!std::isfinite(a)) throw InputError("tl_scale: coefficient must be finite");
    return softplus(a * softplus_inv(x));
}

/// Row-wise transformed-linear map: t(M t^{-1}(z)).
inline Eigen::VectorXd tl_matvec(const Eigen::MatrixXd& m, const Eigen::VectorXd& z) {
    if (m.cols() != z.size())
        throw InputError("tl_matvec: dimension mismatch (" + std::to_string(m.cols()) +
                         " cols vs vector of size " + std::to_string(z.size()) + ")");
    Eigen::VectorXd y(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) y[i] = softplus_inv(z[i]);
    Eigen::VectorXd w = m * y;
    Eigen::VectorXd out(m.rows());
    for (Eigen::Index i = 0; i < m.rows(); ++i) out[i] = softplus(w[i]);
    return out;
}

/// n x p sample matrix with strictly positive entries. `standardized` marks
/// margins rank-transformed to Pareto(1, shape 2).
struct StandardizedMatrix {
    Eigen::MatrixXd data;
    bool standardized = false;

    Eigen::Index n() const { return data.rows(); }
    Eigen::Index p() const { return data.cols(); }
};

/// Pareto(1, shape 2) quantile function: F^{-1}(u) = (1-u)^{-1/2}.
inline double pareto2_quantile(double u) {
    if (!(u >= 0.0 && u < 1.0)) throw InputError("pareto2_quantile: u must lie in [0,1)");
    return 1.0 / std::sqrt(1.0 - u);
}

/// i.i.d. Pareto(1, shape 2) draws via inverse CDF.
inline Eigen::VectorXd sample_pareto2(Eigen::Index count, Rng& rng) {
    if (count < 0) throw InputError("sample_pareto2: negative count");
    Eigen::VectorXd out(count);
    for (Eigen::Index i = 0; i < count; ++i) out[i] = pareto2_quantile(rng.u01());
    return out;
}

/// Average (midrank) 1-based ranks; ties share the mean of their rank range.
inline std::vector<double> average_ranks(std::span<const double> values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && values[order[j]] == values[order[i]]) ++j;
        const double avg = 0.5 * static_cast<double>(i + 1 + j);  // mean of ranks i+1..j
        for (std::size_t k = i; k < j; ++k) ranks[order[k]] = avg;
        i = j;
    }
    return ranks;
}

/// Rank-based marginal standardization to Pareto(1, shape 2):
/// x'_l = (1 - r_l/(n+1))^{-1/2} with average ranks for ties.
inline std::vector<double> rank_to_pareto2(std::span<const double> column) {
    const std::size_t n = column.size();
    if (n < 2) throw InputError("rank_to_pareto2: need at least 2 observations");
    for (double v : column)
        if (std::isnan(v)) throw InputError("rank_to_pareto2: NaN in input");
    const std::vector<double> ranks = average_ranks(column);
    std::vector<double> out(n);
    const double denom = static_cast<double>(n + 1);
    for (std::size_t l = 0; l < n; ++l) out[l] = 1.0 / std::sqrt(1.0 - ranks[l] / denom);
    return out;
}

/// Applies rank_to_pareto2 to every column.
inline StandardizedMatrix standardize_columns(const Eigen::MatrixXd& raw) {
    StandardizedMatrix out;
    out.data.resize(raw.rows(), raw.cols());
    std::vector<double> col(static_cast<std::size_t>(raw.rows()));
    for (Eigen::Index j = 0; j < raw.cols(); ++j) {
        for (Eigen::Index i = 0; i < raw.rows(); ++i) col[static_cast<std::size_t>(i)] = raw(i, j);
        const std::vector<double> std_col = rank_to_pareto2(col);
        for (Eigen::Index i = 0; i < raw.rows(); ++i) out.data(i, j) = std_col[static_cast<std::size_t>(i)];
    }
    out.standardized = true;
    return out;
}

/// Default exceedance count for hill_estimator: the number of observations
/// strictly above the empirical q-quantile (lower order statistic).
inline long hill_default_k(std::span<const double> column, double q) {
    if (!(q > 0.0 && q < 1.0)) throw InputError("hill_default_k: q must lie in (0,1)");
    const auto n = static_cast<long>(column.size());
    if (n < 1) throw InputError("hill_default_k: empty input");
    std::vector<double> work(column.begin(), column.end());
    long idx = static_cast<long>(std::ceil(q * static_cast<double>(n) - 1e-9));
    idx = std::clamp<long>(idx, 1, n);
    std::nth_element(work.begin(), work.begin() + (idx - 1), work.end());
    const double threshold = work[static_cast<std::size_t>(idx - 1)];
    long k = 0;
    for (double v : column)
        if (v > threshold) ++k;
    return k;
}

/// Classical Hill estimate of the tail index from the k largest observations.
inline double hill_estimator(std::span<const double> column, long k) {
    const long n = static_cast<long>(column.size());
    if (k < 2 || k >= n) throw InputError("hill_estimator: require 2 <= k < n");
    std::vector<double> sorted(column.begin(), column.end());
    for (double v : sorted)
        if (!(v > 0.0)) throw InputError("hill_estimator: all values must be positive");
    std::sort(sorted.begin(), sorted.end());
    const double threshold = sorted[static_cast<std::size_t>(n - k - 1)];  // X_(n-k)
    double sum = 0.0;
    for (long i = 1; i <= k; ++i)
        sum += std::log(sorted[static_cast<std::size_t>(n - i)] / threshold);
    return static_cast<double>(k) / sum;
}

}  // namespace extail
