#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "extail/common.hpp"
#include "extail/graph.hpp"
#include "extail/tla.hpp"

// Tail pairwise dependence matrix: empirical estimation with radial
// thresholding, and the analytic form induced by a path-coefficient matrix.

namespace extail {

struct RadialDecomposition {
    Eigen::VectorXd radii;   // l2 norm per sample row
    Eigen::MatrixXd angles;  // rows x_l / r_l
};

struct Tpdm {
    Eigen::MatrixXd sigma;    // p x p, symmetric, entrywise >= 0 for valid input
    double total_mass = 0.0;  // m-hat (estimated) or trace (analytic)
    double threshold = 0.0;   // r_0 (0 for analytic)
    long exceedances = 0;     // N (0 for analytic)

    Eigen::Index p() const { return sigma.rows(); }
};

inline RadialDecomposition radial_angular(const StandardizedMatrix& x) {
    RadialDecomposition out;
    out.radii.resize(x.n());
    out.angles.resize(x.n(), x.p());
    for (Eigen::Index l = 0; l < x.n(); ++l) {
        const double r = x.data.row(l).norm();
        if (!(r > 0.0)) throw InputError("radial_angular: zero row at index " + std::to_string(l));
        out.radii[l] = r;
        out.angles.row(l) = x.data.row(l) / r;
    }
    return out;
}

/// Empirical q-quantile as the lower (type-1) order statistic at ceil(q*n).
inline double select_threshold(const Eigen::VectorXd& radii, double q) {
    if (!(q > 0.0 && q < 1.0)) throw InputError("select_threshold: q must lie in (0,1)");
    const Eigen::Index n = radii.size();
    if (n < 1) throw InputError("select_threshold: empty input");
    // the epsilon guards against q*n landing just above an integer
    const double target = q * static_cast<double>(n);
    Eigen::Index idx = static_cast<Eigen::Index>(std::ceil(target - 1e-9));
    idx = std::clamp<Eigen::Index>(idx, 1, n);
    std::vector<double> work(radii.data(), radii.data() + n);
    std::nth_element(work.begin(), work.begin() + (idx - 1), work.end());
    return work[static_cast<std::size_t>(idx - 1)];
}

/// Threshold-exceedance TPDM estimate:
///   sigma_ij = m_hat / N * sum_l x_li x_lj / r_l^2 over r_l > r_0,
///   m_hat    = r_0^2 N / n.
inline Tpdm estimate_tpdm(const StandardizedMatrix& x, double q) {
    const Eigen::Index n = x.n();
    const Eigen::Index p = x.p();
    Eigen::VectorXd radii(n);
    for (Eigen::Index l = 0; l < n; ++l) {
        const double r = x.data.row(l).norm();
        if (!(r > 0.0)) throw InputError("estimate_tpdm: zero row at index " + std::to_string(l));
        radii[l] = r;
    }
    const double r0 = select_threshold(radii, q);

    long exceed = 0;
    for (Eigen::Index l = 0; l < n; ++l)
        if (radii[l] > r0) ++exceed;
    if (exceed < p + 2) throw InsufficientExceedances(exceed, p + 2);

    const double mass = r0 * r0 * static_cast<double>(exceed) / static_cast<double>(n);

    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(p, p);
    for (Eigen::Index l = 0; l < n; ++l) {
        if (!(radii[l] > r0)) continue;
        const double inv_r2 = 1.0 / (radii[l] * radii[l]);
        for (Eigen::Index i = 0; i < p; ++i)
            for (Eigen::Index j = i; j < p; ++j) sums(i, j) += x.data(l, i) * x.data(l, j) * inv_r2;
    }
    Tpdm out;
    out.sigma.resize(p, p);
    const double scale = mass / static_cast<double>(exceed);
    for (Eigen::Index i = 0; i < p; ++i)
        for (Eigen::Index j = i; j < p; ++j) {
            const double v = scale * sums(i, j);
            out.sigma(i, j) = v;
            out.sigma(j, i) = v;
        }
    out.total_mass = mass;
    out.threshold = r0;
    out.exceedances = exceed;
    return out;
}

/// TPDM induced by a path-coefficient matrix B and diagonal scales A:
/// (I-B)^{-1} A^2 [(I-B)^{-1}]^T. Requires B's support to be acyclic.
inline Tpdm analytic_tpdm(const Eigen::MatrixXd& b, const Eigen::VectorXd& a_diag) {
    const Eigen::Index p = b.rows();
    if (b.cols() != p) throw InputError("analytic_tpdm: B must be square");
    if (a_diag.size() != p) throw InputError("analytic_tpdm: scale vector size mismatch");
    for (Eigen::Index i = 0; i < p; ++i) {
        if (!(a_diag[i] > 0.0)) throw InputError("analytic_tpdm: scales must be positive");
        for (Eigen::Index j = 0; j < p; ++j)
            if (b(i, j) < 0.0) throw InputError("analytic_tpdm: B must be nonnegative");
    }
    Dag support;
    support.p = static_cast<int>(p);
    for (Eigen::Index i = 0; i < p; ++i)
        for (Eigen::Index j = 0; j < p; ++j)
            if (b(i, j) != 0.0) support.add_edge(static_cast<int>(j), static_cast<int>(i));
    topological_order(support);  // throws CyclicGraphError on a cycle

    const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(p, p);
    const Eigen::MatrixXd inv = (identity - b).partialPivLu().solve(identity);
    if (!inv.allFinite())
        throw InternalError("analytic_tpdm: (I-B) singular despite acyclic support");
    const Eigen::MatrixXd k = inv * a_diag.asDiagonal();
    Eigen::MatrixXd sigma = k * k.transpose();
    for (Eigen::Index i = 0; i < p; ++i)
        for (Eigen::Index j = i + 1; j < p; ++j) {
            const double v = 0.5 * (sigma(i, j) + sigma(j, i));
            sigma(i, j) = v;
            sigma(j, i) = v;
        }
    Tpdm out;
    out.sigma = std::move(sigma);
    out.total_mass = out.sigma.trace();
    return out;
}

}  // namespace extail
