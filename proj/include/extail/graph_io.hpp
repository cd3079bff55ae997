#pragma once

#include <charconv>
#include <cstdio>
#include <string>

#include <json.hpp>

#include "extail/common.hpp"
#include "extail/discovery.hpp"
#include "extail/graph.hpp"

// Graph interchange. JSON is the single source of truth:
//   {"p": int, "directed": [[j,i],...], "undirected": [[i,j],...],
//    "lagged": [[j,delta,i],...]}
// DOT is derived from it and never parsed back.

namespace extail {

/// Any graph, as loaded from or written to the interchange schema. A directed
/// pair [j, i] reads j -> i; lagged triples are [j, delta, i].
struct GraphJson {
    int p = 0;
    EdgeSet directed;
    EdgeSet undirected;
    LagEdgeSet lagged;
};

inline GraphJson as_graph_json(const Dag& g) { return {g.p, g.edges, {}, {}}; }

inline GraphJson as_graph_json(const UndirectedGraph& g) { return {g.p, {}, g.edges, {}}; }

inline GraphJson as_graph_json(const Cpdag& g) { return {g.p, g.directed, g.undirected, {}}; }

inline GraphJson as_graph_json(const TsGraph& g) {
    GraphJson out;
    out.p = g.p;
    out.undirected = g.undirected;
    for (const auto& [j, delta, i] : g.edges) {
        if (delta == 0)
            out.directed.insert({j, i});
        else
            out.lagged.insert({j, delta, i});
    }
    return out;
}

inline nlohmann::json graph_to_json(const GraphJson& g) {
    nlohmann::json out;
    out["p"] = g.p;
    out["directed"] = nlohmann::json::array();
    for (const auto& [j, i] : g.directed) out["directed"].push_back({j, i});
    out["undirected"] = nlohmann::json::array();
    for (const auto& [a, b] : g.undirected) out["undirected"].push_back({a, b});
    out["lagged"] = nlohmann::json::array();
    for (const auto& [j, d, i] : g.lagged) out["lagged"].push_back({j, d, i});
    return out;
}

inline GraphJson graph_from_json(const nlohmann::json& j) {
    GraphJson g;
    try {
        g.p = j.at("p").get<int>();
        if (g.p < 0) throw InputError("graph json: negative p");
        auto check = [&](int v) {
            if (v < 0 || v >= g.p) throw InputError("graph json: vertex out of range");
        };
        for (const auto& e : j.value("directed", nlohmann::json::array())) {
            const int a = e.at(0).get<int>(), b = e.at(1).get<int>();
            check(a);
            check(b);
            g.directed.insert({a, b});
        }
        for (const auto& e : j.value("undirected", nlohmann::json::array())) {
            const int a = e.at(0).get<int>(), b = e.at(1).get<int>();
            check(a);
            check(b);
            g.undirected.insert(unordered_edge(a, b));
        }
        for (const auto& e : j.value("lagged", nlohmann::json::array())) {
            const int a = e.at(0).get<int>(), d = e.at(1).get<int>(), b = e.at(2).get<int>();
            check(a);
            check(b);
            if (d < 1) throw InputError("graph json: lagged edge with lag < 1");
            g.lagged.insert({a, d, b});
        }
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("graph json: ") + e.what());
    }
    return g;
}

/// Mixed-mode DOT: one digraph; undirected edges carry dir=none, lagged edges
/// are red with a lag label.
inline std::string graph_to_dot(const GraphJson& g, const std::string& name = "G") {
    std::string out = "digraph " + name + " {\n";
    for (int v = 0; v < g.p; ++v) out += "  v" + std::to_string(v) + ";\n";
    for (const auto& [j, i] : g.directed)
        out += "  v" + std::to_string(j) + " -> v" + std::to_string(i) + ";\n";
    for (const auto& [a, b] : g.undirected)
        out += "  v" + std::to_string(a) + " -> v" + std::to_string(b) + " [dir=none];\n";
    for (const auto& [j, d, i] : g.lagged)
        out += "  v" + std::to_string(j) + " -> v" + std::to_string(i) +
               " [color=red, label=\"lag=" + std::to_string(d) + "\"];\n";
    out += "}\n";
    return out;
}

struct Metrics {
    double ned = 0.0;
    double uned = 0.0;
    double ned_star = 0.0;
    bool has_ned_star = false;
};

namespace detail {

/// An undirected edge stands for both ordered pairs, so the directed
/// comparison expands them.
inline EdgeSet expanded_directed(const GraphJson& g) {
    EdgeSet out = g.directed;
    for (const auto& [a, b] : g.undirected) {
        out.insert({a, b});
        out.insert({b, a});
    }
    return out;
}

inline EdgeSet skeleton_edges(const GraphJson& g) {
    EdgeSet out = undirected_closure(g.directed);
    for (const auto& e : g.undirected) out.insert(e);
    return out;
}

}  // namespace detail

/// NED/UNED/NED* between a truth graph and an estimate. With lagged edges the
/// metrics cover the lag-annotated sets; NED* needs a fully directed
/// (DAG) truth and is reported only then.
inline Metrics evaluate_graphs(const GraphJson& truth, const GraphJson& est) {
    if (truth.p != est.p) throw InputError("evaluate: vertex-count mismatch");
    Metrics m;
    if (!truth.lagged.empty() || !est.lagged.empty()) {
        // lag-annotated comparison; contemporaneous edges keep their lag-0 tag
        LagEdgeSet t, e;
        for (const auto& [j, i] : detail::expanded_directed(truth)) t.insert({j, 0, i});
        for (const auto& le : truth.lagged) t.insert(le);
        for (const auto& [j, i] : detail::expanded_directed(est)) e.insert({j, 0, i});
        for (const auto& le : est.lagged) e.insert(le);
        m.ned = ned(t, e);
        LagEdgeSet tu, eu;
        for (const auto& [j, d, i] : t) tu.insert({std::min(i, j), d, std::max(i, j)});
        for (const auto& [j, d, i] : e) eu.insert({std::min(i, j), d, std::max(i, j)});
        m.uned = ned(tu, eu);
        return m;
    }
    m.ned = ned(detail::expanded_directed(truth), detail::expanded_directed(est));
    m.uned = ned(detail::skeleton_edges(truth), detail::skeleton_edges(est));
    if (truth.undirected.empty()) {
        Dag truth_dag;
        truth_dag.p = truth.p;
        for (const auto& [j, i] : truth.directed) truth_dag.add_edge(j, i);
        Cpdag est_class;
        est_class.p = est.p;
        est_class.directed = est.directed;
        est_class.undirected = est.undirected;
        m.ned_star = ned_star(truth_dag, est_class);
        m.has_ned_star = true;
    }
    return m;
}

/// NED restricted to lagged edges (time-series recovery metric).
inline double ned_lagged(const GraphJson& truth, const GraphJson& est) {
    return ned(truth.lagged, est.lagged);
}

/// Direction-blind variant on lag-annotated skeletons.
inline double uned_lagged(const GraphJson& truth, const GraphJson& est) {
    LagEdgeSet t, e;
    for (const auto& [j, d, i] : truth.lagged) t.insert({std::min(i, j), d, std::max(i, j)});
    for (const auto& [j, d, i] : est.lagged) e.insert({std::min(i, j), d, std::max(i, j)});
    return ned(t, e);
}

}  // namespace extail
