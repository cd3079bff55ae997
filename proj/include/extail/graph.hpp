#pragma once

#include <array>
#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "extail/common.hpp"

// Graph representations, separation semantics, equivalence-class computation,
// and edge-recovery metrics.

namespace extail {

using Edge = std::pair<int, int>;          // (j, i) reads j -> i for directed sets
using LagEdge = std::array<int, 3>;        // (j, delta, i): j at lag delta -> i at time t
using EdgeSet = std::set<Edge>;
using LagEdgeSet = std::set<LagEdge>;

inline Edge unordered_edge(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

namespace detail {
inline void check_vertex(int v, int p, const char* who) {
    if (v < 0 || v >= p)
        throw InputError(std::string(who) + ": vertex " + std::to_string(v) + " out of range");
}
}  // namespace detail

struct Dag {
    int p = 0;
    EdgeSet edges;  // (j, i) = j -> i

    void add_edge(int from, int to) {
        detail::check_vertex(from, p, "Dag::add_edge");
        detail::check_vertex(to, p, "Dag::add_edge");
        if (from == to) throw InputError("Dag::add_edge: self-loop");
        edges.insert({from, to});
    }
    bool has_edge(int from, int to) const { return edges.count({from, to}) > 0; }
    bool adjacent(int a, int b) const { return has_edge(a, b) || has_edge(b, a); }

    std::vector<std::vector<int>> parents_of() const {
        std::vector<std::vector<int>> pa(p);
        for (const auto& [j, i] : edges) pa[i].push_back(j);
        return pa;
    }
    std::vector<std::vector<int>> children_of() const {
        std::vector<std::vector<int>> ch(p);
        for (const auto& [j, i] : edges) ch[j].push_back(i);
        return ch;
    }
};

struct UndirectedGraph {
    int p = 0;
    EdgeSet edges;  // normalized (min, max)

    void add_edge(int a, int b) {
        detail::check_vertex(a, p, "UndirectedGraph::add_edge");
        detail::check_vertex(b, p, "UndirectedGraph::add_edge");
        if (a == b) throw InputError("UndirectedGraph::add_edge: self-loop");
        edges.insert(unordered_edge(a, b));
    }
    bool adjacent(int a, int b) const { return edges.count(unordered_edge(a, b)) > 0; }

    std::vector<std::vector<int>> neighbors_of() const {
        std::vector<std::vector<int>> nb(p);
        for (const auto& [a, b] : edges) {
            nb[a].push_back(b);
            nb[b].push_back(a);
        }
        for (auto& v : nb) std::sort(v.begin(), v.end());
        return nb;
    }
};

/// Mixed graph for a Markov equivalence class: every skeleton edge is either
/// directed or undirected, never both.
struct Cpdag {
    int p = 0;
    EdgeSet directed;    // (j, i) = j -> i
    EdgeSet undirected;  // normalized (min, max)

    bool adjacent(int a, int b) const {
        return directed.count({a, b}) > 0 || directed.count({b, a}) > 0 ||
               undirected.count(unordered_edge(a, b)) > 0;
    }

    bool operator==(const Cpdag& other) const {
        return p == other.p && directed == other.directed && undirected == other.undirected;
    }
};

/// Stationary time-series graph with lag-annotated edges. Learner output may
/// leave contemporaneous edges unresolved; those live in `undirected`.
struct TsGraph {
    int p = 0;
    int tau = 0;
    LagEdgeSet edges;    // directed (j, delta, i)
    EdgeSet undirected;  // contemporaneous, direction not identified

    void add_edge(int from, int delta, int to) {
        detail::check_vertex(from, p, "TsGraph::add_edge");
        detail::check_vertex(to, p, "TsGraph::add_edge");
        if (delta < 0 || delta > tau)
            throw InputError("TsGraph::add_edge: lag " + std::to_string(delta) + " out of range");
        if (delta == 0 && from == to) throw InputError("TsGraph::add_edge: contemporaneous self-loop");
        edges.insert({from, delta, to});
    }

    LagEdgeSet lagged() const {
        LagEdgeSet out;
        for (const auto& e : edges)
            if (e[1] > 0) out.insert(e);
        return out;
    }
};

/// Kahn's algorithm with smallest-index tie-breaking; reports one cycle when
/// the graph is not acyclic.
inline std::vector<int> topological_order(const Dag& g) {
    std::vector<int> indeg(g.p, 0);
    for (const auto& [j, i] : g.edges) {
        (void)j;
        ++indeg[i];
    }
    const auto children = g.children_of();
    std::vector<bool> placed(g.p, false);
    std::vector<int> order;
    order.reserve(g.p);
    for (int step = 0; step < g.p; ++step) {
        int pick = -1;
        for (int v = 0; v < g.p; ++v) {
            if (!placed[v] && indeg[v] == 0) {
                pick = v;
                break;
            }
        }
        if (pick < 0) {
            // walk parent links among the remaining vertices until a repeat
            std::vector<int> trail;
            std::vector<int> seen(g.p, -1);
            int v = 0;
            while (placed[v]) ++v;
            const auto parents = g.parents_of();
            while (seen[v] < 0) {
                seen[v] = static_cast<int>(trail.size());
                trail.push_back(v);
                for (int u : parents[v]) {
                    if (!placed[u]) {
                        v = u;
                        break;
                    }
                }
            }
            std::vector<int> cycle(trail.begin() + seen[v], trail.end());
            std::reverse(cycle.begin(), cycle.end());
            std::string msg = "cyclic graph; cycle:";
            for (int c : cycle) msg += " " + std::to_string(c);
            throw CyclicGraphError(msg, cycle);
        }
        placed[pick] = true;
        order.push_back(pick);
        for (int c : children[pick]) --indeg[c];
    }
    return order;
}

namespace detail {
inline void check_separation_args(int p, int i, int j, const std::vector<int>& cond) {
    check_vertex(i, p, "separation");
    check_vertex(j, p, "separation");
    if (i == j) throw InputError("separation: endpoints must differ");
    for (int s : cond) {
        check_vertex(s, p, "separation");
        if (s == i || s == j) throw InputError("separation: conditioning set overlaps endpoints");
    }
}
}  // namespace detail

/// d-separation via the standard reachability formulation: i and j are
/// d-connected given S iff an active trail exists, where colliders stay active
/// only when they (or a descendant) appear in S.
inline bool d_separated(const Dag& g, int i, int j, const std::vector<int>& cond) {
    detail::check_separation_args(g.p, i, j, cond);
    std::vector<bool> in_cond(g.p, false);
    for (int s : cond) in_cond[s] = true;

    const auto parents = g.parents_of();
    const auto children = g.children_of();

    // ancestors of S (including S)
    std::vector<bool> anc(g.p, false);
    std::deque<int> queue(cond.begin(), cond.end());
    for (int s : cond) anc[s] = true;
    while (!queue.empty()) {
        const int v = queue.front();
        queue.pop_front();
        for (int u : parents[v]) {
            if (!anc[u]) {
                anc[u] = true;
                queue.push_back(u);
            }
        }
    }

    // states (vertex, arrived-from-child?) seeded as if leaving i upward
    std::vector<std::array<bool, 2>> visited(g.p, {false, false});
    std::deque<std::pair<int, bool>> frontier;
    frontier.push_back({i, true});
    while (!frontier.empty()) {
        auto [v, up] = frontier.front();
        frontier.pop_front();
        if (visited[v][up ? 1 : 0]) continue;
        visited[v][up ? 1 : 0] = true;
        if (v == j) return false;
        if (up) {
            if (!in_cond[v]) {
                for (int u : parents[v]) frontier.push_back({u, true});
                for (int c : children[v]) frontier.push_back({c, false});
            }
        } else {
            if (!in_cond[v]) {
                for (int c : children[v]) frontier.push_back({c, false});
            }
            if (anc[v]) {
                for (int u : parents[v]) frontier.push_back({u, true});
            }
        }
    }
    return true;
}

/// Separation in an undirected graph: removing S disconnects i from j.
inline bool u_separated(const UndirectedGraph& g, int i, int j, const std::vector<int>& cond) {
    detail::check_separation_args(g.p, i, j, cond);
    std::vector<bool> blocked(g.p, false);
    for (int s : cond) blocked[s] = true;
    const auto nb = g.neighbors_of();
    std::vector<bool> seen(g.p, false);
    std::deque<int> queue{i};
    seen[i] = true;
    while (!queue.empty()) {
        const int v = queue.front();
        queue.pop_front();
        if (v == j) return false;
        for (int u : nb[v]) {
            if (!seen[u] && !blocked[u]) {
                seen[u] = true;
                queue.push_back(u);
            }
        }
    }
    return true;
}

// --- Meek orientation rules -------------------------------------------------

namespace detail {

/// True if the undirected edge {a, b} must be oriented a -> b by rules 1-4.
inline bool meek_forces(const Cpdag& g, int a, int b) {
    // R1: z -> a, z and b non-adjacent
    for (const auto& [z, tgt] : g.directed)
        if (tgt == a && z != b && !g.adjacent(z, b)) return true;
    // R2: a -> z -> b
    for (const auto& [src, z] : g.directed)
        if (src == a && g.directed.count({z, b}) > 0) return true;
    // R3: a - z, a - w, z -> b, w -> b, z and w non-adjacent
    {
        std::vector<int> candidates;
        for (const auto& [z, tgt] : g.directed)
            if (tgt == b && z != a && g.undirected.count(unordered_edge(a, z)) > 0)
                candidates.push_back(z);
        for (std::size_t x = 0; x < candidates.size(); ++x)
            for (std::size_t y = x + 1; y < candidates.size(); ++y)
                if (!g.adjacent(candidates[x], candidates[y])) return true;
    }
    // R4: a - z, z -> w, w -> b, z and b non-adjacent, a and w adjacent
    for (const auto& [z, w] : g.directed) {
        if (z == a || z == b || w == a || w == b) continue;
        if (g.undirected.count(unordered_edge(a, z)) == 0) continue;
        if (g.directed.count({w, b}) == 0) continue;
        if (!g.adjacent(z, b) && g.adjacent(a, w)) return true;
    }
    return false;
}

/// Closes a partially directed graph under Meek rules 1-4. Scans undirected
/// edges in sorted order until a fixpoint, so the result is deterministic.
inline void meek_closure(Cpdag& g) {
    bool changed = true;
    while (changed) {
        changed = false;
        // fixed scan order; orientations apply immediately
        const std::vector<Edge> pending(g.undirected.begin(), g.undirected.end());
        for (const auto& [a, b] : pending) {
            if (g.undirected.count({a, b}) == 0) continue;
            const bool fwd = meek_forces(g, a, b);
            const bool bwd = meek_forces(g, b, a);
            if (fwd == bwd) continue;  // neither, or both (leave untouched)
            g.undirected.erase({a, b});
            if (fwd)
                g.directed.insert({a, b});
            else
                g.directed.insert({b, a});
            changed = true;
        }
    }
}

}  // namespace detail

/// CPDAG of the Markov equivalence class of g: skeleton, v-structures, and
/// Meek closure. Every DAG in the class maps to the same output.
inline Cpdag cpdag_of(const Dag& g) {
    topological_order(g);  // validates acyclicity
    Cpdag out;
    out.p = g.p;
    for (const auto& [j, i] : g.edges) out.undirected.insert(unordered_edge(j, i));

    const auto parents = g.parents_of();
    EdgeSet vstruct;
    for (int k = 0; k < g.p; ++k) {
        const auto& pa = parents[k];
        for (std::size_t x = 0; x < pa.size(); ++x)
            for (std::size_t y = x + 1; y < pa.size(); ++y)
                if (!g.adjacent(pa[x], pa[y])) {
                    vstruct.insert({pa[x], k});
                    vstruct.insert({pa[y], k});
                }
    }
    for (const auto& [j, i] : vstruct) {
        out.undirected.erase(unordered_edge(j, i));
        out.directed.insert({j, i});
    }
    detail::meek_closure(out);
    return out;
}

// --- Recovery metrics ---------------------------------------------------------

/// Normalized edit distance between two edge sets; empty-vs-empty counts as 0.
template <typename Set>
double ned(const Set& truth, const Set& est) {
    std::size_t miss = 0, extra = 0;
    for (const auto& e : truth)
        if (est.count(e) == 0) ++miss;
    for (const auto& e : est)
        if (truth.count(e) == 0) ++extra;
    const std::size_t denom = truth.size() + est.size();
    if (denom == 0) return 0.0;
    return static_cast<double>(miss + extra) / static_cast<double>(denom);
}

inline EdgeSet undirected_closure(const EdgeSet& edges) {
    EdgeSet out;
    for (const auto& [a, b] : edges) out.insert(unordered_edge(a, b));
    return out;
}

/// NED on undirected closures.
inline double uned(const EdgeSet& truth, const EdgeSet& est) {
    return ned(undirected_closure(truth), undirected_closure(est));
}

/// NED restricted to edges whose direction d-separation can identify: the
/// directed part of the truth's CPDAG against the estimate's directed part.
inline double ned_star(const Dag& truth, const Cpdag& est) {
    if (truth.p != est.p) throw InputError("ned_star: vertex-count mismatch");
    const Cpdag truth_class = cpdag_of(truth);
    return ned(truth_class.directed, est.directed);
}

}  // namespace extail
