#pragma once

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "extail/common.hpp"
#include "extail/discovery.hpp"
#include "extail/graph_io.hpp"
#include "extail/model_io.hpp"
#include "extail/models.hpp"
#include "extail/ptcc.hpp"
#include "extail/tla.hpp"

// Command-line front end: simulation with ground truth, discovery, metric
// evaluation, and grid experiments with reproducible seeding.
//
// Exit codes: 0 success, 1 input error, 2 estimation error, 3 internal error.

namespace extail::cli {

namespace fs = std::filesystem;

/// Shortest decimal that round-trips the exact double, locale-independent.
inline std::string format_double(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::string iso_timestamp(bool deterministic) {
    if (deterministic) return "1970-01-01T00:00:00Z";
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

inline void write_text_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot open for writing: " + path.string());
    out << content;
}

inline void write_json_file(const fs::path& path, const nlohmann::json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

inline void write_manifest(const fs::path& out_dir, const std::string& command,
                           const nlohmann::json& params, std::uint64_t seed,
                           const std::vector<std::string>& inputs,
                           const std::vector<std::string>& outputs, bool deterministic) {
    nlohmann::json m;
    m["command"] = command;
    m["params"] = params;
    m["seed"] = seed;
    m["inputs"] = inputs;
    m["outputs"] = outputs;
    m["tool_version"] = kVersion;
    m["timestamp"] = iso_timestamp(deterministic);
    write_json_file(out_dir / "manifest.json", m);
}

inline std::string matrix_to_csv(const Eigen::MatrixXd& m) {
    std::string out;
    out.reserve(static_cast<std::size_t>(m.size()) * 12);
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        if (j > 0) out += ',';
        out += "x" + std::to_string(j + 1);
    }
    out += '\n';
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j > 0) out += ',';
            out += format_double(m(i, j));
        }
        out += '\n';
    }
    return out;
}

/// Parses a rectangular numeric CSV; optionally rank-standardizes margins.
inline StandardizedMatrix ingest_csv(const fs::path& path, bool has_header, bool standardize) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open: " + path.string());
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    std::size_t width = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line_no == 1 && has_header) continue;
        if (line.empty()) continue;
        std::vector<double> row;
        std::size_t pos = 0;
        while (pos <= line.size()) {
            std::size_t comma = line.find(',', pos);
            if (comma == std::string::npos) comma = line.size();
            const char* begin = line.data() + pos;
            const char* end = line.data() + comma;
            while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
            double value = 0.0;
            const auto res = std::from_chars(begin, end, value);
            if (res.ec != std::errc{} || res.ptr != end)
                throw InputError("line " + std::to_string(line_no) + ": non-numeric cell '" +
                                 std::string(begin, end) + "'");
            row.push_back(value);
            pos = comma + 1;
            if (comma == line.size()) break;
        }
        if (width == 0) width = row.size();
        if (row.size() != width)
            throw InputError("line " + std::to_string(line_no) + ": ragged row (" +
                             std::to_string(row.size()) + " cells, expected " +
                             std::to_string(width) + ")");
        rows.push_back(std::move(row));
    }
    if (rows.size() < 10)
        throw InputError("need at least 10 data rows, got " + std::to_string(rows.size()));
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < width; ++j)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    if (standardize) return standardize_columns(m);
    if (!(m.array() > 0.0).all())
        throw InputError("matrix has nonpositive entries; rerun without --no-standardize");
    return {m, false};
}

// --- simulate ----------------------------------------------------------------

struct SimulateOptions {
    std::string model;  // xscm | ts-xscm | emn | max-linear
    int p = 6;
    double phi = 0.5;
    long n = 5000;
    int tau = 1;
    bool contemporaneous = false;
    std::uint64_t seed = 0;
    std::string out_dir;
    std::string spec_file;
    bool deterministic = false;
};

inline int cmd_simulate(const SimulateOptions& opt) {
    Rng rng(opt.seed);
    nlohmann::json spec_json;
    Eigen::MatrixXd data;

    auto load_spec = [&]() -> std::optional<nlohmann::json> {
        if (opt.spec_file.empty()) return std::nullopt;
        std::ifstream in(opt.spec_file);
        if (!in) throw InputError("cannot open spec file: " + opt.spec_file);
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw InputError(std::string("spec file: ") + e.what());
        }
        return j;
    };
    const auto supplied = load_spec();

    if (opt.model == "xscm") {
        const XscmSpec spec = supplied ? xscm_from_json(*supplied) : random_xscm(opt.p, opt.phi, rng);
        if (spec.tau != 0) throw InputError("simulate xscm: spec file has lags; use ts-xscm");
        spec_json = xscm_to_json(spec);
        data = sample_xscm(spec, opt.n, rng).data;
    } else if (opt.model == "ts-xscm") {
        const XscmSpec spec = supplied ? xscm_from_json(*supplied)
                                       : random_ts_xscm(opt.p, opt.phi, opt.tau,
                                                        opt.contemporaneous, rng);
        if (spec.tau < 1) throw InputError("simulate ts-xscm: spec must have tau >= 1");
        spec_json = xscm_to_json(spec);
        data = sample_ts_xscm(spec, opt.n, rng).data;
    } else if (opt.model == "emn") {
        const EmnSpec spec = supplied ? emn_from_json(*supplied) : random_emn(opt.p, opt.phi, rng);
        spec_json = emn_to_json(spec);
        data = sample_emn(spec, opt.n, rng).data;
    } else if (opt.model == "max-linear") {
        const MaxLinearSpec spec =
            supplied ? max_linear_from_json(*supplied) : random_max_linear(opt.p, opt.phi, rng);
        spec_json = max_linear_to_json(spec);
        data = sample_max_linear(spec, opt.n, rng).data;
    } else {
        throw InputError("unknown model: " + opt.model);
    }

    const fs::path dir(opt.out_dir);
    fs::create_directories(dir);
    write_json_file(dir / "spec.json", spec_json);
    write_text_file(dir / "data.csv", matrix_to_csv(data));
    nlohmann::json params;
    params["model"] = opt.model;
    if (supplied) {
        params["spec_file"] = opt.spec_file;
    } else {
        params["p"] = opt.p;
        params["phi"] = opt.phi;
        if (opt.model == "ts-xscm") {
            params["tau"] = opt.tau;
            params["contemporaneous"] = opt.contemporaneous;
        }
    }
    params["n"] = opt.n;
    write_manifest(dir, "simulate", params, opt.seed,
                   supplied ? std::vector<std::string>{opt.spec_file} : std::vector<std::string>{},
                   {"spec.json", "data.csv"}, opt.deterministic);
    std::cout << "wrote " << (dir / "data.csv").string() << " (" << data.rows() << " x "
              << data.cols() << ")\n";
    return 0;
}

// --- discover / learn-mn -------------------------------------------------------

struct DiscoverOptions {
    std::string in_csv;
    DiscoveryConfig cfg;
    bool has_header = true;
    bool standardize = true;
    std::uint64_t seed = 0;
    std::string out_dir;
    bool deterministic = false;
    bool markov_network = false;  // learn-mn: skeleton only, undirected output
};

inline nlohmann::json report_to_json(const DiscoveryConfig& cfg, const RunReport& report,
                                     std::uint64_t seed, bool deterministic) {
    nlohmann::json out;
    // worker count is an execution detail, not part of the statistical config
    out["config"] = {{"q", cfg.q},
                     {"alpha", cfg.alpha},
                     {"tau", cfg.tau},
                     {"max_cond_size", cfg.max_cond_size}};
    out["tests_run"] = report.tests_run;
    out["tests_skipped"] = report.tests_skipped;
    out["orientation_conflicts"] = report.orientation_conflicts;
    out["runtime_ms"] = deterministic ? 0.0 : report.runtime_ms;
    out["seed"] = seed;
    return out;
}

inline int cmd_discover(const DiscoverOptions& opt) {
    const StandardizedMatrix x = ingest_csv(opt.in_csv, opt.has_header, opt.standardize);
    const auto t0 = std::chrono::steady_clock::now();

    GraphJson graph;
    RunReport report;
    if (opt.markov_network) {
        EmnDiscovery result = learn_emn(x, opt.cfg);
        graph = as_graph_json(result.graph);
        report = result.report;
    } else if (opt.cfg.tau == 0) {
        DagDiscovery result = discover_dag(x, opt.cfg);
        graph = as_graph_json(result.cpdag);
        report = result.report;
    } else {
        TsDiscovery result = discover_ts(x, opt.cfg);
        graph = as_graph_json(result.graph);
        report = result.report;
    }
    report.runtime_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

    const fs::path dir(opt.out_dir);
    fs::create_directories(dir);
    write_json_file(dir / "graph.json", graph_to_json(graph));
    write_text_file(dir / "graph.dot", graph_to_dot(graph));
    write_json_file(dir / "report.json",
                    report_to_json(opt.cfg, report, opt.seed, opt.deterministic));
    nlohmann::json params = {{"q", opt.cfg.q},
                             {"alpha", opt.cfg.alpha},
                             {"tau", opt.cfg.tau},
                             {"max_cond_size", opt.cfg.max_cond_size},
                             {"threads", opt.cfg.threads},
                             {"standardize", opt.standardize},
                             {"has_header", opt.has_header}};
    write_manifest(dir, opt.markov_network ? "learn-mn" : "discover", params, opt.seed,
                   {opt.in_csv}, {"graph.json", "graph.dot", "report.json"}, opt.deterministic);
    std::cout << "wrote " << (dir / "graph.json").string() << "\n";
    return 0;
}

// --- evaluate ------------------------------------------------------------------

struct EvaluateOptions {
    std::string truth_path;
    std::string est_path;
    std::string out_dir;  // optional
    bool deterministic = false;
};

inline nlohmann::json load_json_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw InputError(path.string() + ": " + e.what());
    }
    return j;
}

inline int cmd_evaluate(const EvaluateOptions& opt) {
    const GraphJson truth = graph_from_json(load_json_file(opt.truth_path));
    const GraphJson est = graph_from_json(load_json_file(opt.est_path));
    const Metrics m = evaluate_graphs(truth, est);
    nlohmann::json out;
    out["ned"] = m.ned;
    out["uned"] = m.uned;
    if (m.has_ned_star) out["ned_star"] = m.ned_star;
    if (!truth.lagged.empty() || !est.lagged.empty()) out["ned_lagged"] = ned_lagged(truth, est);
    std::cout << out.dump(2) << "\n";
    if (!opt.out_dir.empty()) {
        const fs::path dir(opt.out_dir);
        fs::create_directories(dir);
        write_json_file(dir / "metrics.json", out);
        write_manifest(dir, "evaluate", nlohmann::json::object(), 0,
                       {opt.truth_path, opt.est_path}, {"metrics.json"}, opt.deterministic);
    }
    return 0;
}

// --- experiment ------------------------------------------------------------------

struct ExperimentOptions {
    std::string scenario;  // dag | emn | ts
    std::vector<int> p_grid{10};
    std::vector<double> phi_grid{0.25};
    std::vector<long> n_grid{5000};  // series length for ts
    std::vector<double> q_grid;      // empty: use q
    std::vector<double> alpha_grid;  // empty: use alpha
    double q = 0.99;
    double alpha = 0.005;
    int tau = 1;
    bool contemporaneous = false;
    int replicates = 20;
    std::uint64_t seed = 0;
    int threads = 1;
    std::string out_dir;
    bool deterministic = false;
};

struct ExperimentRow {
    std::string scenario;
    int p = 0;
    double phi = 0.0;
    long n = 0;
    double q = 0.0;
    double alpha = 0.0;
    int tau = 0;
    int replicate = 0;
    std::uint64_t seed = 0;
    std::optional<Metrics> metrics;
    double runtime_ms = 0.0;
    std::string status = "ok";
};

/// One simulate -> discover -> evaluate run.
inline ExperimentRow run_replicate(const ExperimentOptions& opt, int p, double phi, long n,
                                   double q, double alpha, int replicate, std::uint64_t seed) {
    ExperimentRow row;
    row.scenario = opt.scenario;
    row.p = p;
    row.phi = phi;
    row.n = n;
    row.q = q;
    row.alpha = alpha;
    row.tau = opt.scenario == "ts" ? opt.tau : 0;
    row.replicate = replicate;
    row.seed = seed;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        Rng rng(seed);
        DiscoveryConfig cfg;
        cfg.q = q;
        cfg.alpha = alpha;
        cfg.threads = 1;  // parallelism lives at the replicate level
        if (opt.scenario == "dag") {
            const XscmSpec spec = random_xscm(p, phi, rng);
            const StandardizedMatrix x = standardize_columns(sample_xscm(spec, n, rng).data);
            const DagDiscovery result = discover_dag(x, cfg);
            row.metrics =
                evaluate_graphs(as_graph_json(xscm_dag(spec)), as_graph_json(result.cpdag));
        } else if (opt.scenario == "emn") {
            const EmnSpec spec = random_emn(p, phi, rng);
            const StandardizedMatrix x = standardize_columns(sample_emn(spec, n, rng).data);
            const EmnDiscovery result = learn_emn(x, cfg);
            row.metrics =
                evaluate_graphs(as_graph_json(emn_graph(spec)), as_graph_json(result.graph));
        } else if (opt.scenario == "ts") {
            cfg.tau = opt.tau;
            const XscmSpec spec = random_ts_xscm(p, phi, opt.tau, opt.contemporaneous, rng);
            const StandardizedMatrix x = standardize_columns(sample_ts_xscm(spec, n, rng).data);
            const TsDiscovery result = discover_ts(x, cfg);
            const GraphJson truth = as_graph_json(xscm_ts_graph(spec));
            const GraphJson est = as_graph_json(result.graph);
            // lag-restricted distances: contemporaneous edges are ignored
            Metrics m;
            m.ned = ned_lagged(truth, est);
            m.uned = uned_lagged(truth, est);
            row.metrics = m;
        } else {
            throw InputError("unknown scenario: " + opt.scenario);
        }
    } catch (const std::exception& e) {
        row.status = std::string("error: ") + e.what();
    }
    row.runtime_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return row;
}

inline std::string experiment_csv(const std::vector<ExperimentRow>& rows, bool deterministic) {
    std::string out = "scenario,p,phi,n,q,alpha,tau,replicate,seed,ned,uned,ned_star,runtime_ms,status\n";
    for (const auto& r : rows) {
        out += r.scenario + ',' + std::to_string(r.p) + ',' + format_double(r.phi) + ',' +
               std::to_string(r.n) + ',' + format_double(r.q) + ',' + format_double(r.alpha) +
               ',' + std::to_string(r.tau) + ',' + std::to_string(r.replicate) + ',' +
               std::to_string(r.seed) + ',';
        if (r.metrics) {
            out += format_double(r.metrics->ned) + ',' + format_double(r.metrics->uned) + ',';
            if (r.metrics->has_ned_star) out += format_double(r.metrics->ned_star);
        } else {
            out += ",,";
        }
        std::string status = r.status;
        std::replace(status.begin(), status.end(), ',', ';');
        out += ',' + (deterministic ? std::string("0") : format_double(r.runtime_ms)) + ',' +
               status + '\n';
    }
    return out;
}

inline int cmd_experiment(const ExperimentOptions& opt) {
    if (opt.replicates < 1) throw InputError("experiment: replicates must be positive");
    const std::vector<double> qs = opt.q_grid.empty() ? std::vector<double>{opt.q} : opt.q_grid;
    const std::vector<double> alphas =
        opt.alpha_grid.empty() ? std::vector<double>{opt.alpha} : opt.alpha_grid;

    struct Cell {
        int p;
        double phi;
        long n;
        double q;
        double alpha;
    };
    std::vector<Cell> cells;
    for (int p : opt.p_grid)
        for (double phi : opt.phi_grid)
            for (long n : opt.n_grid)
                for (double q : qs)
                    for (double alpha : alphas) cells.push_back({p, phi, n, q, alpha});
    if (cells.empty()) throw InputError("experiment: empty grid");

    std::vector<ExperimentRow> rows(cells.size() * static_cast<std::size_t>(opt.replicates));
    parallel_for(rows.size(), opt.threads, [&](std::size_t idx) {
        const Cell& cell = cells[idx / static_cast<std::size_t>(opt.replicates)];
        const int rep = static_cast<int>(idx % static_cast<std::size_t>(opt.replicates));
        const std::uint64_t rep_seed = Rng::mix64(opt.seed ^ static_cast<std::uint64_t>(idx));
        rows[idx] =
            run_replicate(opt, cell.p, cell.phi, cell.n, cell.q, cell.alpha, rep, rep_seed);
    });

    const fs::path dir(opt.out_dir);
    fs::create_directories(dir);
    write_text_file(dir / "metrics.csv", experiment_csv(rows, opt.deterministic));
    nlohmann::json params;
    params["scenario"] = opt.scenario;
    params["p_grid"] = opt.p_grid;
    params["phi_grid"] = opt.phi_grid;
    params["n_grid"] = opt.n_grid;
    params["q_grid"] = qs;
    params["alpha_grid"] = alphas;
    params["replicates"] = opt.replicates;
    if (opt.scenario == "ts") {
        params["tau"] = opt.tau;
        params["contemporaneous"] = opt.contemporaneous;
    }
    write_manifest(dir, "experiment", params, opt.seed, {}, {"metrics.csv"}, opt.deterministic);
    std::cout << "wrote " << (dir / "metrics.csv").string() << " (" << rows.size() << " rows)\n";
    return 0;
}

// --- CLI wiring ------------------------------------------------------------------

inline int run_cli(int argc, const char* const* argv) {
    CLI::App app{"Causal discovery and undirected-network learning for heavy-tailed data"};
    app.require_subcommand(1);

    SimulateOptions sim;
    auto* sim_cmd = app.add_subcommand("simulate", "Generate data with ground truth");
    sim_cmd->add_option("--model", sim.model, "xscm | ts-xscm | emn | max-linear")->required();
    sim_cmd->add_option("--p", sim.p, "variable count");
    sim_cmd->add_option("--phi", sim.phi, "connectivity parameter in (0,1)");
    sim_cmd->add_option("--n,--T", sim.n, "sample count (series length for ts-xscm)");
    sim_cmd->add_option("--tau", sim.tau, "max lag (ts-xscm)");
    sim_cmd->add_flag("--contemporaneous", sim.contemporaneous,
                      "allow contemporaneous effects (ts-xscm)");
    sim_cmd->add_option("--seed", sim.seed, "rng seed")->envname("EXTAIL_SEED");
    sim_cmd->add_option("--out", sim.out_dir, "output directory")->required();
    sim_cmd->add_option("--spec-file", sim.spec_file, "use an explicit spec json");
    sim_cmd->add_flag("--deterministic", sim.deterministic, "zero volatile manifest fields");

    DiscoverOptions disc;
    auto* disc_cmd = app.add_subcommand("discover", "Learn a causal graph from CSV data");
    DiscoverOptions mn;
    mn.markov_network = true;
    auto* mn_cmd = app.add_subcommand("learn-mn", "Learn an undirected extremal network");
    for (auto [cmd, opt] : {std::pair{disc_cmd, &disc}, std::pair{mn_cmd, &mn}}) {
        cmd->add_option("--in", opt->in_csv, "input CSV")->required();
        cmd->add_option("--q", opt->cfg.q, "radial threshold quantile");
        cmd->add_option("--alpha", opt->cfg.alpha, "test significance level");
        if (!opt->markov_network) cmd->add_option("--tau", opt->cfg.tau, "max causal lag");
        cmd->add_option("--max-cond-size", opt->cfg.max_cond_size,
                        "cap on conditioning-set size (-1: p-2)");
        cmd->add_option("--threads", opt->cfg.threads, "worker threads");
        cmd->add_option("--seed", opt->seed, "recorded in the manifest")->envname("EXTAIL_SEED");
        cmd->add_option("--out", opt->out_dir, "output directory")->required();
        cmd->add_flag("!--no-standardize", opt->standardize, "skip rank standardization");
        cmd->add_flag("!--no-header", opt->has_header, "input has no header row");
        cmd->add_flag("--deterministic", opt->deterministic, "zero volatile report fields");
    }

    EvaluateOptions eval;
    auto* eval_cmd = app.add_subcommand("evaluate", "Edit-distance metrics between graphs");
    eval_cmd->add_option("--truth", eval.truth_path, "truth graph json")->required();
    eval_cmd->add_option("--est", eval.est_path, "estimated graph json")->required();
    eval_cmd->add_option("--out", eval.out_dir, "optional output directory");
    eval_cmd->add_flag("--deterministic", eval.deterministic, "zero volatile manifest fields");

    ExperimentOptions exp;
    auto* exp_cmd = app.add_subcommand("experiment", "Replicated simulate/discover/evaluate grid");
    exp_cmd->add_option("--scenario", exp.scenario, "dag | emn | ts")->required();
    exp_cmd->add_option("--p-grid", exp.p_grid, "variable counts")->delimiter(',');
    exp_cmd->add_option("--phi-grid", exp.phi_grid, "connectivity values")->delimiter(',');
    exp_cmd->add_option("--n-grid,--T-grid", exp.n_grid, "sample sizes")->delimiter(',');
    exp_cmd->add_option("--q-grid", exp.q_grid, "sweep of quantiles")->delimiter(',');
    exp_cmd->add_option("--alpha-grid", exp.alpha_grid, "sweep of significance levels")
        ->delimiter(',');
    exp_cmd->add_option("--q", exp.q, "radial threshold quantile");
    exp_cmd->add_option("--alpha", exp.alpha, "test significance level");
    exp_cmd->add_option("--tau", exp.tau, "max lag (ts scenario)");
    exp_cmd->add_flag("--contemporaneous", exp.contemporaneous,
                      "allow contemporaneous effects (ts scenario)");
    exp_cmd->add_option("--replicates", exp.replicates, "replicates per cell");
    exp_cmd->add_option("--seed", exp.seed, "master seed")->envname("EXTAIL_SEED");
    exp_cmd->add_option("--threads", exp.threads, "worker threads");
    exp_cmd->add_option("--out", exp.out_dir, "output directory")->required();
    exp_cmd->add_flag("--deterministic", exp.deterministic, "zero volatile fields");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (sim_cmd->parsed()) return cmd_simulate(sim);
        if (disc_cmd->parsed()) return cmd_discover(disc);
        if (mn_cmd->parsed()) return cmd_discover(mn);
        if (eval_cmd->parsed()) return cmd_evaluate(eval);
        if (exp_cmd->parsed()) return cmd_experiment(exp);
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 1;
    } catch (const EstimationError& e) {
        std::cerr << "estimation error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
    return 1;
}

}  // namespace extail::cli
