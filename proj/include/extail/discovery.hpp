#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "extail/common.hpp"
#include "extail/graph.hpp"
#include "extail/ptcc.hpp"
#include "extail/tla.hpp"

// Constraint-based structure learning driven by partial tail-correlation
// separation tests: PC-stable skeleton, collider/Meek orientation, the
// lag-expanded time-series variant, and undirected-network learning.

namespace extail {

struct DiscoveryConfig {
    double q = 0.99;
    double alpha = 0.005;
    int tau = 0;
    int max_cond_size = -1;  // negative: use p - 2
    int threads = 1;
};

struct SepsetEntry {
    std::vector<int> sepset;
    SeparationTestResult result;
};

/// Keyed by unordered pair; a pair has an entry iff its edge was removed.
using SepsetTable = std::map<Edge, SepsetEntry>;

struct RunReport {
    long tests_run = 0;
    long tests_skipped = 0;
    long orientation_conflicts = 0;
    double runtime_ms = 0.0;
};

enum class TestDecision { kDependent, kIndependent, kSkipped };

struct TestOutcome {
    TestDecision decision = TestDecision::kDependent;
    SeparationTestResult result;
};

/// Separation-test interface the searches run against.
class SeparationTester {
public:
    virtual ~SeparationTester() = default;
    virtual int num_vars() const = 0;
    virtual TestOutcome run(int i, int j, const std::vector<int>& cond) const = 0;
};

/// Data-backed test: residual-exceedance t-test at level alpha. Estimation
/// failures (too few exceedances) come back as skipped.
class PtccTester : public SeparationTester {
public:
    PtccTester(StandardizedMatrix x, double q, double alpha)
        : context_(std::move(x), q), alpha_(alpha) {}

    int num_vars() const override { return static_cast<int>(context_.p()); }

    TestOutcome run(int i, int j, const std::vector<int>& cond) const override {
        TestOutcome out;
        try {
            out.result = context_.test(i, j, cond, alpha_);
        } catch (const EstimationError&) {
            out.decision = TestDecision::kSkipped;
            return out;
        }
        out.decision = out.result.reject ? TestDecision::kDependent : TestDecision::kIndependent;
        return out;
    }

    const PtccContext& context() const { return context_; }

private:
    PtccContext context_;
    double alpha_;
};

/// Exact-zero test against a known TPDM; the executable form of the analytic
/// Markov/faithfulness equivalences.
class AnalyticTester : public SeparationTester {
public:
    explicit AnalyticTester(Tpdm sigma, double tol = 1e-9)
        : sigma_(std::move(sigma)), tol_(tol) {}

    int num_vars() const override { return static_cast<int>(sigma_.p()); }

    TestOutcome run(int i, int j, const std::vector<int>& cond) const override {
        const PartialTailResult r = partial_tail_cov(sigma_, i, j, cond);
        TestOutcome out;
        out.result.gamma = r.gamma;
        out.result.sigma_hat = r.partial_cov(0, 1);
        out.result.cond_size = static_cast<int>(cond.size());
        const bool independent = std::fabs(r.gamma) < tol_;
        out.result.p_value = independent ? 1.0 : 0.0;
        out.result.reject = !independent;
        out.decision = independent ? TestDecision::kIndependent : TestDecision::kDependent;
        return out;
    }

private:
    Tpdm sigma_;
    double tol_;
};

struct SkeletonResult {
    UndirectedGraph graph;
    SepsetTable sepsets;
    RunReport report;
};

namespace detail {

/// Advances `comb` to the next k-combination of {0..m-1} in lexicographic
/// order; false when exhausted.
inline bool next_combination(std::vector<int>& comb, int m) {
    const int k = static_cast<int>(comb.size());
    for (int i = k - 1; i >= 0; --i) {
        if (comb[i] < m - (k - i)) {
            ++comb[i];
            for (int j = i + 1; j < k; ++j) comb[j] = comb[j - 1] + 1;
            return true;
        }
    }
    return false;
}

struct PairScan {
    std::optional<SepsetEntry> found;
    long tests = 0;
    long skips = 0;
};

}  // namespace detail

/// PC-stable skeleton search. Starts from the complete graph (or from
/// `candidate_pairs` when given), removes edges level-synchronously, and
/// records the separating set found per removed pair. Within a level all
/// ordered pairs are tested against the same adjacency snapshot, so results
/// do not depend on the worker count.
inline SkeletonResult learn_skeleton(const SeparationTester& tester, const DiscoveryConfig& cfg,
                                     const std::vector<Edge>* candidate_pairs = nullptr) {
    const int p = tester.num_vars();
    SkeletonResult out;
    out.graph.p = p;

    std::vector<std::vector<char>> adj(p, std::vector<char>(p, 0));
    if (candidate_pairs) {
        for (const auto& [a, b] : *candidate_pairs) {
            detail::check_vertex(a, p, "learn_skeleton");
            detail::check_vertex(b, p, "learn_skeleton");
            if (a == b) throw InputError("learn_skeleton: self-loop candidate");
            adj[a][b] = adj[b][a] = 1;
        }
    } else {
        for (int a = 0; a < p; ++a)
            for (int b = 0; b < p; ++b) adj[a][b] = (a != b);
    }

    const int max_level = cfg.max_cond_size < 0 ? p - 2 : std::min(cfg.max_cond_size, p - 2);
    for (int level = 0; level <= max_level; ++level) {
        // snapshot adjacency; removals apply only at the level barrier
        const auto snapshot = adj;
        auto snapshot_neighbors = [&](int v, int excluded) {
            std::vector<int> nb;
            for (int u = 0; u < p; ++u)
                if (u != v && u != excluded && snapshot[v][u]) nb.push_back(u);
            return nb;
        };

        std::vector<Edge> ordered_pairs;
        for (int i = 0; i < p; ++i)
            for (int j = 0; j < p; ++j) {
                if (i == j || !snapshot[i][j]) continue;
                if (static_cast<int>(snapshot_neighbors(i, j).size()) >= level)
                    ordered_pairs.push_back({i, j});
            }
        if (ordered_pairs.empty()) break;

        std::vector<detail::PairScan> scans(ordered_pairs.size());
        parallel_for(ordered_pairs.size(), cfg.threads, [&](std::size_t idx) {
            const auto [i, j] = ordered_pairs[idx];
            detail::PairScan& scan = scans[idx];
            const std::vector<int> pool = snapshot_neighbors(i, j);
            const int m = static_cast<int>(pool.size());
            std::vector<int> comb(level);
            for (int k = 0; k < level; ++k) comb[k] = k;
            std::vector<int> cond(level);
            bool more = true;
            while (more) {
                for (int k = 0; k < level; ++k) cond[k] = pool[static_cast<std::size_t>(comb[k])];
                const TestOutcome outcome = tester.run(i, j, cond);
                ++scan.tests;
                if (outcome.decision == TestDecision::kSkipped) {
                    ++scan.skips;
                } else if (outcome.decision == TestDecision::kIndependent) {
                    scan.found = SepsetEntry{cond, outcome.result};
                    break;
                }
                more = level > 0 && detail::next_combination(comb, m);
                if (level == 0) break;
            }
        });

        // merge in lexicographic pair order: first finder names the sepset
        for (std::size_t idx = 0; idx < ordered_pairs.size(); ++idx) {
            out.report.tests_run += scans[idx].tests;
            out.report.tests_skipped += scans[idx].skips;
            if (!scans[idx].found) continue;
            const auto [i, j] = ordered_pairs[idx];
            const Edge key = unordered_edge(i, j);
            if (out.sepsets.count(key) == 0) out.sepsets.emplace(key, *scans[idx].found);
            adj[i][j] = adj[j][i] = 0;
        }
    }

    for (int a = 0; a < p; ++a)
        for (int b = a + 1; b < p; ++b)
            if (adj[a][b]) out.graph.add_edge(a, b);
    return out;
}

/// Collider orientation from sepsets followed by Meek closure. An edge
/// demanded in both directions reverts to undirected and is counted.
inline Cpdag orient(const UndirectedGraph& skeleton, const SepsetTable& sepsets,
                    long* conflicts = nullptr) {
    Cpdag out;
    out.p = skeleton.p;
    out.undirected = skeleton.edges;

    const auto neighbors = skeleton.neighbors_of();
    std::map<Edge, std::array<bool, 2>> demands;  // unordered edge -> {min->max, max->min}
    for (int k = 0; k < skeleton.p; ++k) {
        const auto& nb = neighbors[k];
        for (std::size_t x = 0; x < nb.size(); ++x)
            for (std::size_t y = x + 1; y < nb.size(); ++y) {
                const int i = nb[x];
                const int j = nb[y];
                if (skeleton.adjacent(i, j)) continue;  // shielded
                const auto entry = sepsets.find(unordered_edge(i, j));
                if (entry == sepsets.end()) continue;
                const auto& sep = entry->second.sepset;
                if (std::find(sep.begin(), sep.end(), k) != sep.end()) continue;
                // unshielded collider i -> k <- j
                for (int src : {i, j}) {
                    auto& d = demands[unordered_edge(src, k)];
                    d[src < k ? 0 : 1] = true;
                }
            }
    }
    long conflict_count = 0;
    for (const auto& [edge, dir] : demands) {
        if (dir[0] && dir[1]) {
            ++conflict_count;
            continue;  // stays undirected
        }
        out.undirected.erase(edge);
        if (dir[0])
            out.directed.insert({edge.first, edge.second});
        else
            out.directed.insert({edge.second, edge.first});
    }
    if (conflicts) *conflicts = conflict_count;
    detail::meek_closure(out);
    return out;
}

struct DagDiscovery {
    Cpdag cpdag;
    UndirectedGraph skeleton;
    SepsetTable sepsets;
    RunReport report;
};

/// Skeleton followed by orientation over any separation tester.
inline DagDiscovery discover_dag(const SeparationTester& tester, const DiscoveryConfig& cfg) {
    DagDiscovery out;
    SkeletonResult sk = learn_skeleton(tester, cfg);
    out.report = sk.report;
    out.skeleton = sk.graph;
    out.sepsets = std::move(sk.sepsets);
    out.cpdag = orient(out.skeleton, out.sepsets, &out.report.orientation_conflicts);
    return out;
}

inline DagDiscovery discover_dag(const StandardizedMatrix& x, const DiscoveryConfig& cfg) {
    return discover_dag(PtccTester(x, cfg.q, cfg.alpha), cfg);
}

struct EmnDiscovery {
    UndirectedGraph graph;
    RunReport report;
};

/// Skeleton phase only; sepsets and orientation are discarded.
inline EmnDiscovery learn_emn(const SeparationTester& tester, const DiscoveryConfig& cfg) {
    SkeletonResult sk = learn_skeleton(tester, cfg);
    return {std::move(sk.graph), sk.report};
}

inline EmnDiscovery learn_emn(const StandardizedMatrix& x, const DiscoveryConfig& cfg) {
    return learn_emn(PtccTester(x, cfg.q, cfg.alpha), cfg);
}

struct TsDiscovery {
    TsGraph graph;
    RunReport report;
};

/// Stacks [X_t, X_{t-1}, ..., X_{t-tau}] row-wise; lag-expanded variable
/// (i, delta) maps to column delta*p + i.
inline StandardizedMatrix lag_expand(const StandardizedMatrix& x, int tau) {
    const Eigen::Index T = x.n();
    const Eigen::Index p = x.p();
    if (T <= tau) throw InputError("lag_expand: series shorter than the lag window");
    StandardizedMatrix out;
    out.standardized = x.standardized;
    out.data.resize(T - tau, p * (tau + 1));
    for (Eigen::Index t = tau; t < T; ++t)
        for (int delta = 0; delta <= tau; ++delta)
            for (Eigen::Index i = 0; i < p; ++i)
                out.data(t - tau, delta * p + i) = x.data(t - delta, i);
    return out;
}

/// Time-series search: PC-stable over the lag-expanded matrix restricted to
/// pairs with at least one time-t endpoint. Lagged adjacencies orient by
/// time; contemporaneous ones go through the collider/Meek phase. With
/// tau = 0 this is exactly discover_dag.
inline TsDiscovery discover_ts(const StandardizedMatrix& x, const DiscoveryConfig& cfg) {
    const int p = static_cast<int>(x.p());
    const int tau = cfg.tau;
    if (tau < 0) throw InputError("discover_ts: negative tau");
    if (tau == 0) {
        DagDiscovery flat = discover_dag(x, cfg);
        TsDiscovery out;
        out.graph.p = p;
        out.graph.tau = 0;
        for (const auto& [j, i] : flat.cpdag.directed) out.graph.add_edge(j, 0, i);
        out.graph.undirected = flat.cpdag.undirected;
        out.report = flat.report;
        return out;
    }
    if (x.n() <= 10 * (tau + 1))
        throw InputError("discover_ts: series too short for tau=" + std::to_string(tau));

    const StandardizedMatrix expanded = lag_expand(x, tau);
    const PtccTester tester(expanded, cfg.q, cfg.alpha);

    std::vector<Edge> candidates;
    const int total = p * (tau + 1);
    for (int a = 0; a < p; ++a)
        for (int b = a + 1; b < total; ++b) candidates.push_back({a, b});

    SkeletonResult sk = learn_skeleton(tester, cfg, &candidates);

    TsDiscovery out;
    out.graph.p = p;
    out.graph.tau = tau;
    out.report = sk.report;

    UndirectedGraph contemporaneous;
    contemporaneous.p = p;
    for (const auto& [a, b] : sk.graph.edges) {
        if (b < p) {
            contemporaneous.add_edge(a, b);
        } else {
            // b encodes variable b%p at lag b/p feeding a at time t
            out.graph.add_edge(b % p, b / p, a);
        }
    }
    SepsetTable contemporaneous_sepsets;
    for (const auto& [key, entry] : sk.sepsets) {
        if (key.second >= p) continue;
        contemporaneous_sepsets.emplace(key, entry);
    }
    const Cpdag oriented =
        orient(contemporaneous, contemporaneous_sepsets, &out.report.orientation_conflicts);
    for (const auto& [j, i] : oriented.directed) out.graph.add_edge(j, 0, i);
    out.graph.undirected = oriented.undirected;
    return out;
}

}  // namespace extail
