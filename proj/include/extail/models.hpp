#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <cmath>
#include <deque>
#include <vector>

#include "extail/common.hpp"
#include "extail/graph.hpp"
#include "extail/tla.hpp"
#include "extail/tpdm.hpp"

// Ground-truth generators: random structural models over transformed-linear
// combinations of heavy-tailed sources, extremal Markov networks, and the
// max-linear robustness model.

namespace extail {

/// Path-coefficient matrices B_(0)..B_(tau) plus diagonal scales. tau = 0 is
/// the cross-sectional case.
struct XscmSpec {
    int p = 0;
    int tau = 0;
    std::vector<Eigen::MatrixXd> B;  // size tau + 1
    Eigen::VectorXd A;               // diagonal of the scale matrix
};

struct EmnSpec {
    int p = 0;
    Eigen::MatrixXd Q;      // precision: symmetric, off-diagonals <= 0, PD
    Eigen::MatrixXd Sigma;  // Q^{-1}, entrywise >= 0
    Eigen::MatrixXd L;      // lower Cholesky factor of Sigma
};

struct MaxLinearSpec {
    int p = 0;
    Eigen::MatrixXd B;  // nonnegative, acyclic support (lower triangular)
};

inline Dag dag_of_support(const Eigen::MatrixXd& b) {
    Dag g;
    g.p = static_cast<int>(b.rows());
    for (Eigen::Index i = 0; i < b.rows(); ++i)
        for (Eigen::Index j = 0; j < b.cols(); ++j)
            if (b(i, j) > 0.0) g.add_edge(static_cast<int>(j), static_cast<int>(i));
    return g;
}

inline Dag xscm_dag(const XscmSpec& spec) {
    if (spec.tau != 0) throw InputError("xscm_dag: spec has lags; use xscm_ts_graph");
    return dag_of_support(spec.B[0]);
}

inline TsGraph xscm_ts_graph(const XscmSpec& spec) {
    TsGraph g;
    g.p = spec.p;
    g.tau = spec.tau;
    for (int delta = 0; delta <= spec.tau; ++delta)
        for (int i = 0; i < spec.p; ++i)
            for (int j = 0; j < spec.p; ++j)
                if (spec.B[static_cast<std::size_t>(delta)](i, j) > 0.0) g.add_edge(j, delta, i);
    return g;
}

inline UndirectedGraph emn_graph(const EmnSpec& spec) {
    UndirectedGraph g;
    g.p = spec.p;
    for (int i = 0; i < spec.p; ++i)
        for (int j = i + 1; j < spec.p; ++j)
            if (spec.Q(i, j) != 0.0) g.add_edge(i, j);
    return g;
}

/// Spectral radius of the companion matrix of the transformed-scale
/// recursion; the lagged process is stationary iff this is below 1.
inline double ts_companion_spectral_radius(const XscmSpec& spec) {
    const Eigen::Index p = spec.p;
    const Eigen::Index tau = spec.tau;
    const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(p, p);
    const Eigen::MatrixXd inv0 = (identity - spec.B[0]).partialPivLu().solve(identity);
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(p * tau, p * tau);
    for (Eigen::Index delta = 1; delta <= tau; ++delta)
        companion.block(0, (delta - 1) * p, p, p) = inv0 * spec.B[static_cast<std::size_t>(delta)];
    for (Eigen::Index delta = 1; delta < tau; ++delta)
        companion.block(delta * p, (delta - 1) * p, p, p) = identity;
    return companion.eigenvalues().cwiseAbs().maxCoeff();
}

inline void validate_xscm(const XscmSpec& spec) {
    if (spec.p < 1) throw InputError("XscmSpec: p must be positive");
    if (spec.tau < 0) throw InputError("XscmSpec: negative max lag");
    if (static_cast<int>(spec.B.size()) != spec.tau + 1)
        throw InputError("XscmSpec: expected tau+1 coefficient matrices");
    for (const auto& b : spec.B) {
        if (b.rows() != spec.p || b.cols() != spec.p) throw InputError("XscmSpec: B size mismatch");
        if ((b.array() < 0.0).any()) throw InputError("XscmSpec: negative path coefficient");
    }
    if (spec.A.size() != spec.p || !(spec.A.array() > 0.0).all())
        throw InputError("XscmSpec: scales must be positive");
    topological_order(dag_of_support(spec.B[0]));  // contemporaneous slice acyclic
    if (spec.tau >= 1 && !(ts_companion_spectral_radius(spec) < 1.0))
        throw InputError("XscmSpec: lagged recursion is nonstationary (spectral radius >= 1)");
}

/// Strictly lower-triangular B with entries nonzero w.p. phi, values U(0,1);
/// A is the identity. Vertex order is already topological.
inline XscmSpec random_xscm(int p, double phi, Rng& rng) {
    if (p < 2) throw InputError("random_xscm: p must be at least 2");
    if (!(phi > 0.0 && phi < 1.0)) throw InputError("random_xscm: phi must lie in (0,1)");
    XscmSpec spec;
    spec.p = p;
    spec.tau = 0;
    spec.B.assign(1, Eigen::MatrixXd::Zero(p, p));
    spec.A = Eigen::VectorXd::Ones(p);
    for (int i = 1; i < p; ++i)
        for (int j = 0; j < i; ++j)
            if (rng.u01() < phi) spec.B[0](i, j) = rng.u01();
    return spec;
}

/// Same coefficient scheme as random_xscm; consumed by the max-linear sampler.
inline MaxLinearSpec random_max_linear(int p, double phi, Rng& rng) {
    const XscmSpec base = random_xscm(p, phi, rng);
    return {p, base.B[0]};
}

/// B_(0) strictly lower triangular (or zero when contemporaneous is false);
/// lagged matrices are unconstrained Bernoulli(phi)/U(0,1), row-major draws.
/// Draws that violate stationarity of the lagged recursion are rejected and
/// redrawn.
inline XscmSpec random_ts_xscm(int p, double phi, int tau, bool contemporaneous, Rng& rng) {
    if (tau < 1) throw InputError("random_ts_xscm: tau must be at least 1");
    if (p < 2) throw InputError("random_ts_xscm: p must be at least 2");
    if (!(phi > 0.0 && phi < 1.0)) throw InputError("random_ts_xscm: phi must lie in (0,1)");
    for (int attempt = 0; attempt < 1000; ++attempt) {
        XscmSpec spec;
        spec.p = p;
        spec.tau = tau;
        spec.B.assign(static_cast<std::size_t>(tau) + 1, Eigen::MatrixXd::Zero(p, p));
        spec.A = Eigen::VectorXd::Ones(p);
        if (contemporaneous) {
            for (int i = 1; i < p; ++i)
                for (int j = 0; j < i; ++j)
                    if (rng.u01() < phi) spec.B[0](i, j) = rng.u01();
        }
        for (int delta = 1; delta <= tau; ++delta)
            for (int i = 0; i < p; ++i)
                for (int j = 0; j < p; ++j)
                    if (rng.u01() < phi) spec.B[static_cast<std::size_t>(delta)](i, j) = rng.u01();
        if (ts_companion_spectral_radius(spec) < 1.0) return spec;
    }
    throw EstimationError("random_ts_xscm: no stationary draw in 1000 attempts");
}

/// Direct form X = (I-B)^{-1} A (*) Z with i.i.d. Pareto(1,2) sources, drawn
/// row by row, coordinate by coordinate.
inline StandardizedMatrix sample_xscm(const XscmSpec& spec, Eigen::Index n, Rng& rng) {
    validate_xscm(spec);
    if (spec.tau != 0) throw InputError("sample_xscm: spec has lags; use sample_ts_xscm");
    if (n < 1) throw InputError("sample_xscm: n must be positive");
    const Eigen::Index p = spec.p;
    const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(p, p);
    const Eigen::MatrixXd coef =
        (identity - spec.B[0]).partialPivLu().solve(identity) * spec.A.asDiagonal();
    StandardizedMatrix out;
    out.data.resize(n, p);
    Eigen::VectorXd y(p);
    for (Eigen::Index l = 0; l < n; ++l) {
        for (Eigen::Index i = 0; i < p; ++i) y[i] = softplus_inv(pareto2_quantile(rng.u01()));
        const Eigen::VectorXd w = coef * y;
        for (Eigen::Index i = 0; i < p; ++i) out.data(l, i) = softplus(w[i]);
    }
    return out;
}

inline constexpr int kTsBurnIn = 100;

/// Iterates the lagged direct form
///   X_t = (I - B_(0))^{-1} (B_(1) (*) X_{t-1} (+) ... (+) A (*) Z_t)
/// in the transformed scale. Missing lags at the start are fresh A (*) Z
/// draws, and the first `kTsBurnIn` steps are discarded.
inline StandardizedMatrix sample_ts_xscm(const XscmSpec& spec, Eigen::Index T, Rng& rng) {
    validate_xscm(spec);
    if (spec.tau < 1) throw InputError("sample_ts_xscm: spec.tau must be at least 1");
    if (T < 1) throw InputError("sample_ts_xscm: T must be positive");
    const Eigen::Index p = spec.p;
    const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(p, p);
    const Eigen::MatrixXd inv0 = (identity - spec.B[0]).partialPivLu().solve(identity);

    auto fresh_source = [&] {
        Eigen::VectorXd y(p);
        for (Eigen::Index i = 0; i < p; ++i)
            y[i] = spec.A[i] * softplus_inv(pareto2_quantile(rng.u01()));
        return y;
    };

    // history[d] holds t^{-1}(X_{t-1-d})
    std::deque<Eigen::VectorXd> history;
    for (int d = 0; d < spec.tau; ++d) history.push_back(fresh_source());

    StandardizedMatrix out;
    out.data.resize(T, p);
    for (Eigen::Index step = 0; step < kTsBurnIn + T; ++step) {
        Eigen::VectorXd rhs = fresh_source();
        for (int delta = 1; delta <= spec.tau; ++delta)
            rhs.noalias() +=
                spec.B[static_cast<std::size_t>(delta)] * history[static_cast<std::size_t>(delta - 1)];
        const Eigen::VectorXd y = inv0 * rhs;
        history.push_front(y);
        history.pop_back();
        if (step >= kTsBurnIn) {
            const Eigen::Index row = step - kTsBurnIn;
            for (Eigen::Index i = 0; i < p; ++i) out.data(row, i) = softplus(y[i]);
        }
    }
    return out;
}

/// Builds an EmnSpec from an explicit precision matrix, checking the M-matrix
/// requirements and deriving Sigma and its Cholesky factor.
inline EmnSpec emn_from_precision(const Eigen::MatrixXd& q_matrix) {
    const Eigen::Index p = q_matrix.rows();
    if (q_matrix.cols() != p || p < 1) throw InputError("emn_from_precision: Q must be square");
    for (Eigen::Index i = 0; i < p; ++i)
        for (Eigen::Index j = 0; j < p; ++j) {
            if (q_matrix(i, j) != q_matrix(j, i))
                throw InputError("emn_from_precision: Q must be symmetric");
            if (i != j && q_matrix(i, j) > 0.0)
                throw InputError("emn_from_precision: off-diagonals must be nonpositive");
        }
    const Eigen::LLT<Eigen::MatrixXd> llt_q(q_matrix);
    if (llt_q.info() != Eigen::Success)
        throw InputError("emn_from_precision: Q is not positive definite");
    EmnSpec spec;
    spec.p = static_cast<int>(p);
    spec.Q = q_matrix;
    spec.Sigma = llt_q.solve(Eigen::MatrixXd::Identity(p, p));
    for (Eigen::Index i = 0; i < p; ++i)
        for (Eigen::Index j = i + 1; j < p; ++j) {
            const double v = 0.5 * (spec.Sigma(i, j) + spec.Sigma(j, i));
            spec.Sigma(i, j) = v;
            spec.Sigma(j, i) = v;
        }
    if ((spec.Sigma.array() < -1e-10).any())
        throw InputError("emn_from_precision: Q^{-1} has negative entries");
    const Eigen::LLT<Eigen::MatrixXd> llt_s(spec.Sigma);
    if (llt_s.info() != Eigen::Success)
        throw InternalError("emn_from_precision: Sigma not positive definite");
    spec.L = llt_s.matrixL();
    return spec;
}

/// Symmetric precision with off-diagonals zero w.p. phi, else U[-1,0]; each
/// diagonal sits 0.02 above the largest absolute row/column entry, inflated
/// by 1.1 until Q is positive definite (at most 20 times).
inline EmnSpec random_emn(int p, double phi, Rng& rng) {
    if (p < 2) throw InputError("random_emn: p must be at least 2");
    if (!(phi > 0.0 && phi < 1.0)) throw InputError("random_emn: phi must lie in (0,1)");
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(p, p);
    for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j) {
            if (rng.u01() < phi) continue;
            const double v = -rng.u01();  // U[-1, 0]
            q(i, j) = v;
            q(j, i) = v;
        }
    constexpr double kDiagonalMargin = 0.02;
    for (int i = 0; i < p; ++i) {
        double max_abs = 0.0;
        for (int j = 0; j < p; ++j)
            if (j != i) max_abs = std::max(max_abs, std::fabs(q(i, j)));
        q(i, i) = max_abs + kDiagonalMargin;
    }
    for (int attempt = 0; attempt <= 20; ++attempt) {
        const Eigen::LLT<Eigen::MatrixXd> llt(q);
        if (llt.info() == Eigen::Success) return emn_from_precision(q);
        for (int i = 0; i < p; ++i) q(i, i) *= 1.1;
    }
    throw EstimationError("random_emn: could not reach positive definiteness");
}

/// X = L (*) Z applied literally; L may carry negative entries.
inline StandardizedMatrix sample_emn(const EmnSpec& spec, Eigen::Index n, Rng& rng) {
    if (n < 1) throw InputError("sample_emn: n must be positive");
    const Eigen::Index p = spec.p;
    StandardizedMatrix out;
    out.data.resize(n, p);
    Eigen::VectorXd y(p);
    for (Eigen::Index l = 0; l < n; ++l) {
        for (Eigen::Index i = 0; i < p; ++i) y[i] = softplus_inv(pareto2_quantile(rng.u01()));
        const Eigen::VectorXd w = spec.L * y;
        for (Eigen::Index i = 0; i < p; ++i) out.data(l, i) = softplus(w[i]);
    }
    return out;
}

/// Max-linear recursion X_i = max(Z_i, max_j B_ij X_j) in topological order.
inline StandardizedMatrix sample_max_linear(const MaxLinearSpec& spec, Eigen::Index n, Rng& rng) {
    if (n < 1) throw InputError("sample_max_linear: n must be positive");
    const Eigen::Index p = spec.p;
    if (spec.B.rows() != p || spec.B.cols() != p) throw InputError("sample_max_linear: B size mismatch");
    if ((spec.B.array() < 0.0).any()) throw InputError("sample_max_linear: negative coefficient");
    const std::vector<int> order = topological_order(dag_of_support(spec.B));
    StandardizedMatrix out;
    out.data.resize(n, p);
    Eigen::VectorXd z(p);
    for (Eigen::Index l = 0; l < n; ++l) {
        for (Eigen::Index i = 0; i < p; ++i) z[i] = pareto2_quantile(rng.u01());
        for (int idx : order) {
            double v = z[idx];
            for (Eigen::Index j = 0; j < p; ++j)
                if (spec.B(idx, j) > 0.0) v = std::max(v, spec.B(idx, j) * out.data(l, j));
            out.data(l, idx) = v;
        }
    }
    return out;
}

}  // namespace extail
