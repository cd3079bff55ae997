#pragma once

#include <Eigen/Dense>
#include <string>

#include <json.hpp>

#include "extail/common.hpp"
#include "extail/graph_io.hpp"
#include "extail/models.hpp"

// Ground-truth spec serialization. Matrices are row-major arrays of arrays.

namespace extail {

inline nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Eigen::MatrixXd matrix_from_json(const nlohmann::json& j) {
    if (!j.is_array() || j.empty()) throw InputError("spec json: matrix must be a nonempty array");
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = static_cast<Eigen::Index>(j.at(0).size());
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        if (static_cast<Eigen::Index>(j.at(i).size()) != cols)
            throw InputError("spec json: ragged matrix");
        for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = j.at(i).at(c).get<double>();
    }
    return m;
}

inline nlohmann::json xscm_to_json(const XscmSpec& spec) {
    nlohmann::json out;
    out["model"] = spec.tau == 0 ? "xscm" : "ts-xscm";
    out["p"] = spec.p;
    out["tau"] = spec.tau;
    nlohmann::json mats = nlohmann::json::array();
    for (const auto& b : spec.B) mats.push_back(matrix_to_json(b));
    out["B"] = std::move(mats);
    nlohmann::json scales = nlohmann::json::array();
    for (Eigen::Index i = 0; i < spec.A.size(); ++i) scales.push_back(spec.A[i]);
    out["A"] = std::move(scales);
    out["graph"] = spec.tau == 0 ? graph_to_json(as_graph_json(xscm_dag(spec)))
                                 : graph_to_json(as_graph_json(xscm_ts_graph(spec)));
    return out;
}

inline XscmSpec xscm_from_json(const nlohmann::json& j) {
    XscmSpec spec;
    try {
        spec.p = j.at("p").get<int>();
        spec.tau = j.value("tau", 0);
        for (const auto& b : j.at("B")) spec.B.push_back(matrix_from_json(b));
        const auto& scales = j.at("A");
        spec.A.resize(static_cast<Eigen::Index>(scales.size()));
        for (Eigen::Index i = 0; i < spec.A.size(); ++i) spec.A[i] = scales.at(i).get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("spec json: ") + e.what());
    }
    validate_xscm(spec);
    return spec;
}

inline nlohmann::json emn_to_json(const EmnSpec& spec) {
    nlohmann::json out;
    out["model"] = "emn";
    out["p"] = spec.p;
    out["Q"] = matrix_to_json(spec.Q);
    out["Sigma"] = matrix_to_json(spec.Sigma);
    out["L"] = matrix_to_json(spec.L);
    out["graph"] = graph_to_json(as_graph_json(emn_graph(spec)));
    return out;
}

/// Rebuilds the spec from Q alone so Sigma and L always satisfy the
/// definition-level identities.
inline EmnSpec emn_from_json(const nlohmann::json& j) {
    try {
        return emn_from_precision(matrix_from_json(j.at("Q")));
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("spec json: ") + e.what());
    }
}

inline nlohmann::json max_linear_to_json(const MaxLinearSpec& spec) {
    nlohmann::json out;
    out["model"] = "max-linear";
    out["p"] = spec.p;
    out["B"] = matrix_to_json(spec.B);
    Dag g = dag_of_support(spec.B);
    out["graph"] = graph_to_json(as_graph_json(g));
    return out;
}

inline MaxLinearSpec max_linear_from_json(const nlohmann::json& j) {
    MaxLinearSpec spec;
    try {
        spec.p = j.at("p").get<int>();
        spec.B = matrix_from_json(j.at("B"));
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("spec json: ") + e.what());
    }
    if (spec.B.rows() != spec.p || spec.B.cols() != spec.p)
        throw InputError("spec json: B size mismatch");
    topological_order(dag_of_support(spec.B));
    return spec;
}

}  // namespace extail
