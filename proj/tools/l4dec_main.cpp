// Command-line surface: synth, decompose, sweep, landscape, compare.
// Exit codes: 0 ok, 1 I/O failure, 2 bad arguments, 3 numerical failure.
#include <CLI11.hpp>
#include <json.hpp>

#include <Eigen/Dense>
#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "l4dec/baseline_adm.hpp"
#include "l4dec/common.hpp"
#include "l4dec/landscape.hpp"
#include "l4dec/matrix_io.hpp"
#include "l4dec/metrics.hpp"
#include "l4dec/model.hpp"
#include "l4dec/pipeline.hpp"
#include "l4dec/precond.hpp"
#include "l4dec/reports.hpp"
#include "l4dec/rng.hpp"
#include "l4dec/solver.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace l4dec;

namespace {

// ---------------------------------------------------------------------------
// Small utilities

double now_ms() {
    return std::chrono::duration<double, std::milli>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

std::vector<std::string> split_commas(const std::string& s) {
    std::vector<std::string> out;
    std::string token;
    std::istringstream in(s);
    while (std::getline(in, token, ',')) {
        if (!token.empty()) out.push_back(token);
    }
    return out;
}

std::vector<int> parse_int_list(const std::string& s, const std::string& what) {
    std::vector<int> out;
    for (const auto& tok : split_commas(s)) {
        try {
            std::size_t pos = 0;
            const int v = std::stoi(tok, &pos);
            if (pos != tok.size()) throw std::invalid_argument(tok);
            out.push_back(v);
        } catch (const std::exception&) {
            throw InvalidArgument(what + ": cannot parse integer '" + tok + "'");
        }
    }
    if (out.empty()) throw InvalidArgument(what + ": empty list");
    return out;
}

std::vector<double> parse_double_list(const std::string& s, const std::string& what) {
    std::vector<double> out;
    for (const auto& tok : split_commas(s)) {
        try {
            std::size_t pos = 0;
            const double v = std::stod(tok, &pos);
            if (pos != tok.size()) throw std::invalid_argument(tok);
            out.push_back(v);
        } catch (const std::exception&) {
            throw InvalidArgument(what + ": cannot parse number '" + tok + "'");
        }
    }
    if (out.empty()) throw InvalidArgument(what + ": empty list");
    return out;
}

MatrixKind parse_kind(const std::string& s) {
    if (s == "orth") return MatrixKind::SemiOrthogonal;
    if (s == "general") return MatrixKind::FullColumnRank;
    throw InvalidArgument("unknown matrix kind '" + s + "' (use orth or general)");
}

json load_config(const std::string& path) {
    if (path.empty()) return json::object();
    std::ifstream in(path);
    if (!in) throw IoError(path + ": cannot open config file");
    json cfg;
    try {
        in >> cfg;
    } catch (const std::exception& e) {
        throw InvalidArgument(path + ": config is not valid JSON: " + e.what());
    }
    if (!cfg.is_object()) throw InvalidArgument(path + ": config root must be an object");
    return cfg;
}

std::string config_scalar(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_array()) {
        std::string out;
        for (const auto& item : v) {
            if (!out.empty()) out += ",";
            out += config_scalar(item);
        }
        return out;
    }
    return v.dump();
}

// Flags override config: a config key applies only when the flag was absent.
template <typename T>
void merge_config(const CLI::App& cmd, const json& cfg, const std::string& key, T& var) {
    if (!cfg.contains(key) || cmd.count("--" + key) > 0) return;
    const json& v = cfg.at(key);
    if constexpr (std::is_same_v<T, std::string>) {
        var = config_scalar(v);
    } else if constexpr (std::is_same_v<T, bool>) {
        var = v.get<bool>();
    } else if constexpr (std::is_integral_v<T>) {
        var = static_cast<T>(v.get<long long>());
    } else {
        var = v.get<double>();
    }
}

void write_json_file(const fs::path& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw IoError(path.string() + ": cannot open for writing");
    out << j.dump(2) << "\n";
    if (!out) throw IoError(path.string() + ": write failed");
}

void run_parallel(int jobs, int total, const std::function<void(int)>& fn) {
    jobs = std::max(1, std::min(jobs, total));
    if (jobs <= 1) {
        for (int i = 0; i < total; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(jobs));
    for (int t = 0; t < jobs; ++t)
        pool.emplace_back([&] {
            for (int i; (i = next.fetch_add(1)) < total;) fn(i);
        });
    for (auto& th : pool) th.join();
}

const char* status_name(SolveStatus s) {
    return s == SolveStatus::Converged ? "converged" : "max_iters";
}

const char* case_name(CriticalCase c) {
    switch (c) {
        case CriticalCase::NearZero: return "near_zero";
        case CriticalCase::SingleSpike: return "single_spike";
        case CriticalCase::MultiSpike: return "multi_spike";
    }
    return "unknown";
}

// ---------------------------------------------------------------------------
// Shared option bundles

struct SolverFlags {
    double tol_grad = 1e-8;
    double tol_curv = 1e-6;
    int max_iters = 10000;
    bool deterministic = true;
    std::string init = "percolumn";

    void attach(CLI::App* cmd) {
        cmd->add_option("--tol-grad", tol_grad, "gradient norm stopping tolerance");
        cmd->add_option("--tol-curv", tol_curv, "curvature certificate tolerance");
        cmd->add_option("--max-iters", max_iters, "iteration cap per column");
        cmd->add_flag("--deterministic,!--no-deterministic", deterministic,
                      "fixed-order parallel reductions (default on)");
        cmd->add_option("--init", init,
                        "initialization schedule: percolumn (re-init on deflated data) "
                        "or once (single init before the loop)");
    }
    void merge(const CLI::App& cmd, const json& cfg) {
        merge_config(cmd, cfg, "tol-grad", tol_grad);
        merge_config(cmd, cfg, "tol-curv", tol_curv);
        merge_config(cmd, cfg, "max-iters", max_iters);
        merge_config(cmd, cfg, "deterministic", deterministic);
        merge_config(cmd, cfg, "init", init);
    }
    PipelineOptions pipeline(std::uint64_t seed) const {
        PipelineOptions po;
        po.solver.tol_grad = tol_grad;
        po.solver.tol_curv = tol_curv;
        po.solver.max_iters = max_iters;
        po.solver.deterministic = deterministic;
        po.solver.seed = seed;
        if (init == "once")
            po.init_once = true;
        else if (init != "percolumn")
            throw InvalidArgument("--init must be percolumn or once");
        po.seed = seed;
        return po;
    }
};

// ---------------------------------------------------------------------------
// synth

struct SynthArgs {
    int p = 100, r = 10, n = 5000;
    double theta = 0.1, sigma = 1.0;
    std::uint64_t seed = 0;
    std::string kind = "orth";
    std::string out = ".";
    bool csv = false;
    std::string config;
};

int cmd_synth(const SynthArgs& a) {
    ProblemDims dims{a.p, a.r, a.n};
    dims.validate();
    SparsityModel sm{a.theta, a.sigma};
    sm.validate();
    const MatrixKind kind = parse_kind(a.kind);

    MixingMatrix A = generate_A(dims, kind, a.seed);
    SparseCoefficients X = generate_X(dims, sm, a.seed);
    Eigen::MatrixXd Y = synthesize(A, X);

    fs::create_directories(a.out);
    const std::string ext = a.csv ? ".csv" : ".bin";
    save_matrix(fs::path(a.out) / ("A" + ext), A.entries);
    save_matrix(fs::path(a.out) / ("X" + ext), X.entries);
    save_matrix(fs::path(a.out) / ("Y" + ext), Y);

    json manifest;
    manifest["command"] = "synth";
    manifest["p"] = a.p;
    manifest["r"] = a.r;
    manifest["n"] = a.n;
    manifest["theta"] = a.theta;
    manifest["sigma"] = a.sigma;
    manifest["seed"] = a.seed;
    manifest["kind"] = a.kind;
    manifest["files"] = {{"A", "A" + ext}, {"X", "X" + ext}, {"Y", "Y" + ext}};
    write_json_file(fs::path(a.out) / "manifest.json", manifest);

    std::printf("seed: %llu\n", static_cast<unsigned long long>(a.seed));
    return 0;
}

// ---------------------------------------------------------------------------
// decompose

struct DecomposeArgs {
    std::string input;
    std::string truth;
    int r = 0;
    std::string method = "l4";
    std::string out = ".";
    double rho_e = 0.01;
    std::uint64_t seed = 0;
    bool csv = false;
    bool timing = false;
    SolverFlags solver;
    double adm_lambda = 0.0;  // 0 = data-driven default
    int adm_max_iters = 500;
    double adm_tol = 1e-8;
    std::string config;
};

int cmd_decompose(const DecomposeArgs& a) {
    if (a.input.empty()) throw InvalidArgument("decompose: --input is required");
    if (a.r < 1) throw InvalidArgument("decompose: --r must be a positive integer");
    if (a.method != "l4" && a.method != "adm")
        throw InvalidArgument("decompose: --method must be l4 or adm");

    const Eigen::MatrixXd Y = load_matrix(a.input);
    fs::create_directories(a.out);

    const double t0 = now_ms();
    json report;
    report["command"] = "decompose";
    report["method"] = a.method;
    report["input"] = a.input;
    report["p"] = static_cast<int>(Y.rows());
    report["n"] = static_cast<int>(Y.cols());
    report["r"] = a.r;
    report["rho_e"] = a.rho_e;
    report["seed"] = a.seed;

    Eigen::MatrixXd A_est;
    if (a.method == "l4") {
        RecoveryResult res = recover_all(Y, a.r, a.solver.pipeline(a.seed));
        A_est = res.A_est.entries;
        json cols = json::array();
        for (const auto& c : res.columns) {
            cols.push_back({{"column", c.column},
                            {"iterations", c.iterations},
                            {"status", status_name(c.status)},
                            {"final_value", c.final_value},
                            {"overlap", c.overlap},
                            {"init_used_fallback", c.init_used_fallback},
                            {"retried", c.retried},
                            {"line_search_failed", c.line_search_failed}});
        }
        report["columns"] = cols;
        report["projection_warning"] = res.projection_warning;
        report["init_q0_fallback"] = res.init_q0_fallback;
        for (std::size_t j = 0; j < res.traces.size(); ++j)
            res.traces[j].save_csv(fs::path(a.out) /
                                   ("trace_col" + std::to_string(j) + ".csv"));
    } else {
        AdmOptions opts;
        if (a.adm_lambda > 0.0) opts.lambda = a.adm_lambda;
        opts.max_iters = a.adm_max_iters;
        opts.tol = a.adm_tol;
        AdmRecoveryResult res = adm_recover_all(Y, a.r, opts, a.seed);
        A_est = res.A_est.entries;
        json cols = json::array();
        for (const auto& c : res.columns) {
            cols.push_back({{"column", c.column},
                            {"iterations", c.iterations},
                            {"converged", c.converged},
                            {"lambda_too_large", c.lambda_too_large},
                            {"lambda_used", c.lambda_used},
                            {"final_objective", c.final_objective}});
        }
        report["columns"] = cols;
    }

    const std::string ext = a.csv ? ".csv" : ".bin";
    save_matrix(fs::path(a.out) / ("A_est" + ext), A_est);

    if (!a.truth.empty()) {
        const Eigen::MatrixXd A_true = load_matrix(a.truth);
        if (A_true.rows() != A_est.rows() || A_true.cols() != A_est.cols())
            throw InvalidArgument("decompose: truth shape does not match the estimate");
        RecoveryReport score = score_recovery(A_est, A_true, a.rho_e);
        report["per_column_err"] = score.per_column_err;
        report["frobenius_err"] = score.frobenius_err;
        report["success"] = score.success;
        report["matching"] = {{"perm", score.matching.perm}, {"signs", score.matching.signs}};
    }

    report["wall_time_ms"] = a.timing ? now_ms() - t0 : 0.0;
    write_json_file(fs::path(a.out) / "report.json", report);
    return 0;
}

// ---------------------------------------------------------------------------
// sweep

struct SweepArgs {
    int p = 100;
    std::string r_values = "10";
    std::string theta_values = "0.1";
    std::string n_values = "5000";
    double sigma = 1.0;
    int trials = 20;
    std::uint64_t base_seed = 0;
    std::string mode = "single";
    std::string kind;  // empty = mode default (single: orth, full: general)
    std::string out = ".";
    double rho_e = 0.01;
    int jobs = 1;
    bool timing = false;
    bool paper_scale = false;
    SolverFlags solver;
    double adm_lambda = 0.0;
    int adm_max_iters = 500;
    double adm_tol = 1e-8;
    std::string config;
};

struct TrialOutcome {
    bool failed = false;
    bool success = false;
    double frobenius = std::numeric_limits<double>::quiet_NaN();
    double iters = 0.0;
    double wall_ms = 0.0;
};

struct SweepCell {
    CellParams params;
};

TrialOutcome run_l4_single(const SweepArgs& a, const CellParams& cell, std::uint64_t seed,
                           MatrixKind kind) {
    TrialOutcome out;
    const double t0 = now_ms();
    ProblemDims dims{cell.p, cell.r, cell.n};
    MixingMatrix A = generate_A(dims, kind, seed);
    SparseCoefficients X = generate_X(dims, SparsityModel{cell.theta, a.sigma}, seed);
    Eigen::MatrixXd Y = synthesize(A, X);

    PreconditionedData pre = precondition(Y, cell.r);
    InitQ0 init = init_q0(pre.Ybar, seed);
    Objective obj = Objective::raw_l4(pre.Ybar);
    PipelineOptions po = a.solver.pipeline(seed);
    SolveTrace trace = solve(obj, init.q0, po.solver);
    if (trace.status != SolveStatus::Converged) {
        // One retry from a random unit start in the column space, matching the
        // full pipeline's per-column policy.
        Rng rng(mix_seed(seed, 0x77));
        Eigen::VectorXd g(pre.Ybar.cols());
        for (Eigen::Index i = 0; i < g.size(); ++i) g(i) = rng.normal();
        Eigen::VectorXd v = pre.Ybar * g;
        if (v.norm() > 1e-14 * pre.Ybar.norm()) {
            SolveTrace second = solve(obj, SphereVector{v.normalized()}, po.solver);
            if (second.status == SolveStatus::Converged ||
                second.final_value() < trace.final_value())
                trace = std::move(second);
        }
    }
    InvertResult inv = invert_precondition(trace.final_q.coords, pre.D);

    const double err = err_single(inv.A_est.entries.col(0), A.entries);
    out.success = err <= a.rho_e;
    out.frobenius = err;  // single-column runs record err_single here
    out.iters = trace.iterations();
    out.failed = trace.status != SolveStatus::Converged;
    if (a.timing) out.wall_ms = now_ms() - t0;
    return out;
}

TrialOutcome run_l4_full(const SweepArgs& a, const CellParams& cell, std::uint64_t seed,
                         MatrixKind kind) {
    TrialOutcome out;
    const double t0 = now_ms();
    ProblemDims dims{cell.p, cell.r, cell.n};
    MixingMatrix A = generate_A(dims, kind, seed);
    SparseCoefficients X = generate_X(dims, SparsityModel{cell.theta, a.sigma}, seed);
    Eigen::MatrixXd Y = synthesize(A, X);

    RecoveryResult res = recover_all(Y, cell.r, a.solver.pipeline(seed));
    RecoveryReport score = score_recovery(res.A_est.entries, A.entries, a.rho_e);
    out.success = score.success;
    out.frobenius = score.frobenius_err;
    double iters = 0.0;
    bool stalled = false;
    for (const auto& c : res.columns) {
        iters += c.iterations;
        stalled = stalled || c.status != SolveStatus::Converged;
    }
    out.iters = iters;
    out.failed = stalled;
    if (a.timing) out.wall_ms = now_ms() - t0;
    return out;
}

TrialOutcome run_adm_full(const SweepArgs& a, const CellParams& cell, std::uint64_t seed,
                          MatrixKind kind) {
    TrialOutcome out;
    const double t0 = now_ms();
    ProblemDims dims{cell.p, cell.r, cell.n};
    MixingMatrix A = generate_A(dims, kind, seed);
    SparseCoefficients X = generate_X(dims, SparsityModel{cell.theta, a.sigma}, seed);
    Eigen::MatrixXd Y = synthesize(A, X);

    AdmOptions opts;
    if (a.adm_lambda > 0.0) opts.lambda = a.adm_lambda;
    opts.max_iters = a.adm_max_iters;
    opts.tol = a.adm_tol;
    AdmRecoveryResult res = adm_recover_all(Y, cell.r, opts, seed);
    RecoveryReport score = score_recovery(res.A_est.entries, A.entries, a.rho_e);
    out.success = score.success;
    out.frobenius = score.frobenius_err;
    double iters = 0.0;
    bool stalled = false;
    for (const auto& c : res.columns) {
        iters += c.iterations;
        stalled = stalled || (!c.converged && !c.lambda_too_large);
    }
    out.iters = iters;
    out.failed = stalled;
    if (a.timing) out.wall_ms = now_ms() - t0;
    return out;
}

std::vector<CellResult> aggregate_cells(const std::vector<SweepCell>& cells, int trials,
                                        const std::vector<TrialOutcome>& outcomes) {
    std::vector<CellResult> rows;
    rows.reserve(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
        CellResult row;
        row.params = cells[c].params;
        row.trials = trials;
        double frob_sum = 0.0, iter_sum = 0.0, wall_sum = 0.0;
        int ok_count = 0;
        for (int t = 0; t < trials; ++t) {
            const TrialOutcome& o = outcomes[c * static_cast<std::size_t>(trials) +
                                             static_cast<std::size_t>(t)];
            wall_sum += o.wall_ms;
            if (o.failed) {
                ++row.failed_trials;
                continue;
            }
            ++ok_count;
            if (o.success) ++row.successes;
            frob_sum += o.frobenius;
            iter_sum += o.iters;
        }
        row.success_rate = static_cast<double>(row.successes) / trials;
        row.mean_frobenius_err =
            ok_count > 0 ? frob_sum / ok_count : std::numeric_limits<double>::quiet_NaN();
        row.mean_iters = ok_count > 0 ? iter_sum / ok_count : 0.0;
        row.wall_time_ms = wall_sum;
        rows.push_back(row);
    }
    return rows;
}

void emit_heatmaps(const fs::path& dir, const std::string& prefix,
                   const std::vector<CellResult>& rows, const std::vector<double>& thetas,
                   const std::vector<int>& rs, const std::vector<int>& ns, bool value_is_rate) {
    // One heatmap per n: theta on x, r on y (bottom-up ascending).
    for (int n : ns) {
        Eigen::MatrixXd grid(static_cast<int>(rs.size()), static_cast<int>(thetas.size()));
        grid.setConstant(std::numeric_limits<double>::quiet_NaN());
        for (const auto& row : rows) {
            if (row.params.n != n) continue;
            const auto ti = std::find(thetas.begin(), thetas.end(), row.params.theta);
            const auto ri = std::find(rs.begin(), rs.end(), row.params.r);
            if (ti == thetas.end() || ri == rs.end()) continue;
            grid(static_cast<int>(ri - rs.begin()), static_cast<int>(ti - thetas.begin())) =
                value_is_rate ? row.success_rate : row.mean_frobenius_err;
        }
        std::vector<std::string> xt, yt;
        for (double th : thetas) {
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%g", th);
            xt.push_back(buf);
        }
        for (int r : rs) yt.push_back(std::to_string(r));
        double vmin = 0.0, vmax = 1.0;
        if (!value_is_rate) {
            vmax = 0.0;
            for (int i = 0; i < grid.rows(); ++i)
                for (int j = 0; j < grid.cols(); ++j)
                    if (!std::isnan(grid(i, j))) vmax = std::max(vmax, grid(i, j));
            if (vmax == 0.0) vmax = 1.0;
        }
        write_svg_heatmap(dir / (prefix + "heatmap_n" + std::to_string(n) + ".svg"),
                          value_is_rate ? "Recovery success rate" : "Mean Frobenius error",
                          "theta", xt, "r", yt, grid, vmin, vmax);
    }
}

int cmd_sweep(const SweepArgs& a) {
    if (a.mode == "landscape")
        throw InvalidArgument("sweep: landscape mode is served by the landscape command");
    if (a.mode != "single" && a.mode != "full" && a.mode != "compare")
        throw InvalidArgument("sweep: --mode must be single, full, or compare");
    if (a.trials < 1) throw InvalidArgument("sweep: --trials must be >= 1");
    if (a.jobs < 1) throw InvalidArgument("sweep: --jobs must be >= 1");

    std::vector<int> rs = parse_int_list(a.r_values, "--r-values");
    std::vector<double> thetas = parse_double_list(a.theta_values, "--theta-values");
    std::vector<int> ns = parse_int_list(a.n_values, "--n-values");
    std::sort(rs.begin(), rs.end());
    std::sort(thetas.begin(), thetas.end());
    std::sort(ns.begin(), ns.end());
    rs.erase(std::unique(rs.begin(), rs.end()), rs.end());
    thetas.erase(std::unique(thetas.begin(), thetas.end()), thetas.end());
    ns.erase(std::unique(ns.begin(), ns.end()), ns.end());

    for (double th : thetas) SparsityModel{th, a.sigma}.validate();
    for (int r : rs)
        for (int n : ns) ProblemDims{a.p, r, n}.validate();

    const MatrixKind kind =
        a.kind.empty() ? (a.mode == "single" ? MatrixKind::SemiOrthogonal
                                             : MatrixKind::FullColumnRank)
                       : parse_kind(a.kind);

    // Cells sorted by (theta, r, n); the trial seed is
    // base_seed + cell_index * trials + trial.
    std::vector<SweepCell> cells;
    for (double th : thetas)
        for (int r : rs)
            for (int n : ns) cells.push_back({CellParams{a.p, r, th, n}});

    const int total = static_cast<int>(cells.size()) * a.trials;
    std::vector<TrialOutcome> primary(total), secondary;
    const bool compare = a.mode == "compare";
    if (compare) secondary.resize(total);

    run_parallel(a.jobs, total, [&](int idx) {
        const int cell_idx = idx / a.trials;
        const int trial = idx % a.trials;
        const std::uint64_t seed = a.base_seed +
                                   static_cast<std::uint64_t>(cell_idx) *
                                       static_cast<std::uint64_t>(a.trials) +
                                   static_cast<std::uint64_t>(trial);
        const CellParams& cell = cells[static_cast<std::size_t>(cell_idx)].params;
        try {
            if (a.mode == "single") {
                primary[idx] = run_l4_single(a, cell, seed, kind);
            } else {
                primary[idx] = run_l4_full(a, cell, seed, kind);
            }
        } catch (const std::exception&) {
            primary[idx].failed = true;
        }
        if (compare) {
            try {
                secondary[idx] = run_adm_full(a, cell, seed, kind);
            } catch (const std::exception&) {
                secondary[idx].failed = true;
            }
        }
    });

    fs::create_directories(a.out);
    const bool rate_plot = a.mode == "single";
    if (compare) {
        std::vector<CellResult> l4_rows = aggregate_cells(cells, a.trials, primary);
        std::vector<CellResult> adm_rows = aggregate_cells(cells, a.trials, secondary);
        write_sweep_csv(fs::path(a.out) / "sweep_l4.csv", l4_rows);
        write_sweep_csv(fs::path(a.out) / "sweep_adm.csv", adm_rows);
        emit_heatmaps(a.out, "l4_", l4_rows, thetas, rs, ns, false);
        emit_heatmaps(a.out, "adm_", adm_rows, thetas, rs, ns, false);
    } else {
        std::vector<CellResult> rows = aggregate_cells(cells, a.trials, primary);
        write_sweep_csv(fs::path(a.out) / "sweep.csv", rows);
        emit_heatmaps(a.out, "", rows, thetas, rs, ns, rate_plot);
    }
    return 0;
}

// ---------------------------------------------------------------------------
// landscape

struct LandscapeArgs {
    int p = 10, r = 10;
    double theta = 0.1;
    double c_star = 0.0;  // 0 = default 1/(2r)
    double C_star = 0.25;
    int samples = 500;
    std::uint64_t seed = 0;
    bool analytic_identity = false;
    bool with_data = false;
    int n = 5000;
    double sigma = 1.0;
    std::string out = ".";
    std::string config;
};

int cmd_landscape(const LandscapeArgs& a) {
    if (a.p < 1 || a.r < 1 || a.r > a.p)
        throw InvalidArgument("landscape: need 1 <= r <= p");

    Eigen::MatrixXd A;
    if (a.analytic_identity) {
        A = Eigen::MatrixXd::Identity(a.p, a.p).leftCols(a.r);
    } else if (a.r == a.p) {
        // Square semi-orthogonal draws need no spare dimensions: orthonormal
        // factor of a Gaussian square matrix.
        Rng rng(mix_seed(a.seed, 0x41));
        Eigen::MatrixXd G(a.p, a.p);
        for (Eigen::Index j = 0; j < G.cols(); ++j)
            for (Eigen::Index i = 0; i < G.rows(); ++i) G(i, j) = rng.normal();
        Eigen::BDCSVD<Eigen::MatrixXd> svd(G, Eigen::ComputeThinU | Eigen::ComputeThinV);
        A = svd.matrixU() * svd.matrixV().transpose();
    } else {
        ProblemDims dims{a.p, a.r, std::max(a.n, a.r + 1)};
        A = generate_A(dims, MatrixKind::SemiOrthogonal, a.seed).entries;
    }

    Eigen::MatrixXd Y;
    const Eigen::MatrixXd* data = nullptr;
    if (a.with_data) {
        // Drawn directly: the landscape study allows square dictionaries,
        // which the decomposition model's r < min(p, n) contract excludes.
        if (a.n < 1) throw InvalidArgument("landscape: --n must be positive");
        SparsityModel sm{a.theta, a.sigma};
        sm.validate();
        Rng rng(mix_seed(a.seed, 0x58));
        Eigen::MatrixXd X(a.r, a.n);
        for (Eigen::Index j = 0; j < X.cols(); ++j)
            for (Eigen::Index i = 0; i < X.rows(); ++i)
                X(i, j) = rng.bernoulli(a.theta) ? a.sigma * rng.normal() : 0.0;
        Y = A * X;
        data = &Y;
    }

    const double c_star = a.c_star > 0.0 ? a.c_star : 1.0 / (2.0 * a.r);
    LandscapeReport rep =
        landscape_report(A, a.theta, a.samples, a.seed, c_star, a.C_star, data, a.sigma);

    fs::create_directories(a.out);
    json j;
    j["command"] = "landscape";
    j["p"] = a.p;
    j["r"] = a.r;
    j["theta"] = a.theta;
    j["c_star"] = rep.c_star;
    j["C_star"] = rep.C_star;
    j["samples"] = rep.total;
    j["seed"] = a.seed;
    j["analytic_identity"] = a.analytic_identity;
    j["with_data"] = a.with_data;
    j["theta_condition"] = theta_condition_check(a.theta);
    j["outside_theory"] = rep.outside_theory;
    j["counts"] = {{"r0", rep.count_r0}, {"r1", rep.count_r1}, {"r2", rep.count_r2}};
    j["curvature_quantiles_r2"] = {
        {"q05", rep.curv_q05}, {"q50", rep.curv_q50}, {"q95", rep.curv_q95}};
    if (a.with_data) {
        // NaN serializes as null when no sample landed in R2.
        j["sample_witness_r2"] = {{"q05", rep.sample_witness_q05},
                                  {"q50", rep.sample_witness_q50},
                                  {"q95", rep.sample_witness_q95},
                                  {"negative_fraction", rep.sample_witness_negative_fraction}};
    }
    json tax = json::array();
    for (const auto& row : rep.taxonomy) {
        json entry = {{"k", row.k},
                      {"alpha", row.alpha},
                      {"case", case_name(row.kase)},
                      {"alpha_consistent", row.alpha_consistent}};
        if (std::isnan(row.witness_value))
            entry["witness_value"] = nullptr;
        else
            entry["witness_value"] = row.witness_value;
        tax.push_back(entry);
    }
    j["taxonomy"] = tax;
    write_json_file(fs::path(a.out) / "landscape.json", j);

    std::vector<std::pair<double, double>> pts;
    pts.reserve(rep.samples.size());
    for (const auto& s : rep.samples) pts.emplace_back(s.zeta_inf_sq, s.min_curvature);
    write_svg_scatter(fs::path(a.out) / "scatter.svg",
                      "Peak correlation vs. smallest tangent curvature",
                      "||A^T q||_inf^2", "min tangent eigenvalue", pts);
    return 0;
}

// ---------------------------------------------------------------------------
// compare

struct CompareArgs {
    int p = 100, r = 10, n = 12000;
    double theta = 0.5, sigma = 1.0;
    int seeds = 20;
    std::uint64_t base_seed = 0;
    std::string kind = "orth";
    std::string out = ".";
    double rho_e = 0.01;
    int jobs = 1;
    bool timing = false;
    SolverFlags solver;
    double adm_lambda = 0.0;
    int adm_max_iters = 500;
    double adm_tol = 1e-8;
    std::string config;
};

int cmd_compare(const CompareArgs& a) {
    if (a.seeds < 1) throw InvalidArgument("compare: --seeds must be >= 1");
    ProblemDims dims{a.p, a.r, a.n};
    dims.validate();
    SparsityModel sm{a.theta, a.sigma};
    sm.validate();
    const MatrixKind kind = parse_kind(a.kind);

    struct Pair {
        double l4 = std::numeric_limits<double>::quiet_NaN();
        double adm = std::numeric_limits<double>::quiet_NaN();
        double l4_iters = 0.0, adm_iters = 0.0;
        bool failed = false;
    };
    std::vector<Pair> pairs(static_cast<std::size_t>(a.seeds));

    run_parallel(a.jobs, a.seeds, [&](int i) {
        const std::uint64_t seed = a.base_seed + static_cast<std::uint64_t>(i);
        Pair& pr = pairs[static_cast<std::size_t>(i)];
        try {
            MixingMatrix A = generate_A(dims, kind, seed);
            SparseCoefficients X = generate_X(dims, sm, seed);
            Eigen::MatrixXd Y = synthesize(A, X);

            PipelineOptions po = a.solver.pipeline(seed);
            RecoveryResult l4 = recover_all(Y, a.r, po);
            pr.l4 = score_recovery(l4.A_est.entries, A.entries, a.rho_e).frobenius_err;
            for (const auto& c : l4.columns) pr.l4_iters += c.iterations;

            AdmOptions opts;
            if (a.adm_lambda > 0.0) opts.lambda = a.adm_lambda;
            opts.max_iters = a.adm_max_iters;
            opts.tol = a.adm_tol;
            AdmRecoveryResult adm = adm_recover_all(Y, a.r, opts, seed);
            pr.adm = score_recovery(adm.A_est.entries, A.entries, a.rho_e).frobenius_err;
            for (const auto& c : adm.columns) pr.adm_iters += c.iterations;
        } catch (const std::exception&) {
            pr.failed = true;
        }
    });

    fs::create_directories(a.out);
    std::FILE* f = std::fopen((fs::path(a.out) / "compare.csv").string().c_str(), "w");
    if (!f) throw IoError("compare.csv: cannot open for writing");
    std::fputs("seed,l4_frobenius,adm_frobenius,l4_total_iters,adm_total_iters,l4_wins\n", f);
    int wins = 0, valid = 0;
    double l4_sum = 0.0, adm_sum = 0.0;
    for (int i = 0; i < a.seeds; ++i) {
        const Pair& pr = pairs[static_cast<std::size_t>(i)];
        const int win = !pr.failed && pr.l4 < pr.adm ? 1 : 0;
        if (!pr.failed) {
            ++valid;
            wins += win;
            l4_sum += pr.l4;
            adm_sum += pr.adm;
        }
        std::fprintf(f, "%llu,%.17g,%.17g,%.17g,%.17g,%d\n",
                     static_cast<unsigned long long>(a.base_seed + i), pr.l4, pr.adm,
                     pr.l4_iters, pr.adm_iters, win);
    }
    if (std::fclose(f) != 0) throw IoError("compare.csv: close failed");

    json j;
    j["command"] = "compare";
    j["p"] = a.p;
    j["r"] = a.r;
    j["n"] = a.n;
    j["theta"] = a.theta;
    j["sigma"] = a.sigma;
    j["kind"] = a.kind;
    j["seeds"] = a.seeds;
    j["base_seed"] = a.base_seed;
    j["valid_pairs"] = valid;
    j["l4_win_fraction"] = valid > 0 ? static_cast<double>(wins) / valid : 0.0;
    j["l4_mean_frobenius"] = valid > 0 ? l4_sum / valid : 0.0;
    j["adm_mean_frobenius"] = valid > 0 ? adm_sum / valid : 0.0;
    write_json_file(fs::path(a.out) / "compare.json", j);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sparse dictionary recovery by quartic maximization on the sphere"};
    app.require_subcommand(1);

    SynthArgs sa;
    CLI::App* synth = app.add_subcommand("synth", "generate a seeded (A, X, Y) bundle");
    synth->add_option("--p", sa.p, "ambient dimension");
    synth->add_option("--r", sa.r, "number of dictionary columns");
    synth->add_option("--n", sa.n, "number of samples");
    synth->add_option("--theta", sa.theta, "Bernoulli sparsity level in (0, 1]");
    synth->add_option("--sigma", sa.sigma, "Gaussian amplitude scale");
    synth->add_option("--seed", sa.seed, "instance seed");
    synth->add_option("--kind", sa.kind, "orth | general");
    synth->add_option("--out", sa.out, "output directory");
    synth->add_flag("--csv", sa.csv, "write CSV instead of the binary container");
    synth->add_option("--config", sa.config, "JSON config; flags override");

    DecomposeArgs da;
    CLI::App* dec = app.add_subcommand("decompose", "recover the mixing matrix from Y");
    dec->add_option("--input", da.input, "Y matrix file (.bin or .csv)");
    dec->add_option("--truth", da.truth, "ground-truth A file for scoring");
    dec->add_option("--r", da.r, "number of columns to recover");
    dec->add_option("--method", da.method, "l4 | adm");
    dec->add_option("--out", da.out, "output directory");
    dec->add_option("--rho-e", da.rho_e, "per-column success threshold");
    dec->add_option("--seed", da.seed, "seed for fallback/retry draws");
    dec->add_flag("--csv", da.csv, "write CSV instead of the binary container");
    dec->add_flag("--timing", da.timing, "record wall times (breaks byte determinism)");
    da.solver.attach(dec);
    dec->add_option("--adm-lambda", da.adm_lambda, "ADM l1 penalty (0 = data-driven)");
    dec->add_option("--adm-max-iters", da.adm_max_iters, "ADM sweep cap");
    dec->add_option("--adm-tol", da.adm_tol, "ADM movement tolerance");
    dec->add_option("--config", da.config, "JSON config; flags override");

    SweepArgs wa;
    CLI::App* sw = app.add_subcommand("sweep", "seeded grid of recovery trials");
    sw->add_option("--p", wa.p, "ambient dimension");
    sw->add_option("--r-values", wa.r_values, "comma list of r values");
    sw->add_option("--theta-values", wa.theta_values, "comma list of theta values");
    sw->add_option("--n-values", wa.n_values, "comma list of n values");
    sw->add_option("--sigma", wa.sigma, "Gaussian amplitude scale");
    sw->add_option("--trials", wa.trials, "trials per cell");
    sw->add_option("--base-seed", wa.base_seed, "seed origin; trial seed = base + index");
    sw->add_option("--mode", wa.mode, "single | full | compare");
    sw->add_option("--kind", wa.kind, "orth | general (default by mode)");
    sw->add_option("--out", wa.out, "output directory");
    sw->add_option("--rho-e", wa.rho_e, "success threshold");
    sw->add_option("--jobs", wa.jobs, "concurrent trials");
    sw->add_flag("--timing", wa.timing, "record wall times (breaks byte determinism)");
    sw->add_flag("--paper-scale", wa.paper_scale, "200 trials per cell unless --trials given");
    wa.solver.attach(sw);
    sw->add_option("--adm-lambda", wa.adm_lambda, "ADM l1 penalty (0 = data-driven)");
    sw->add_option("--adm-max-iters", wa.adm_max_iters, "ADM sweep cap");
    sw->add_option("--adm-tol", wa.adm_tol, "ADM movement tolerance");
    sw->add_option("--config", wa.config, "JSON config; flags override");

    LandscapeArgs la;
    CLI::App* land = app.add_subcommand("landscape", "region/curvature/taxonomy report");
    land->add_option("--p", la.p, "ambient dimension");
    land->add_option("--r", la.r, "number of dictionary columns");
    land->add_option("--theta", la.theta, "sparsity level");
    land->add_option("--c-star", la.c_star, "flat-region threshold (0 = 1/(2r))");
    land->add_option("--C-star", la.C_star, "dominant-column threshold");
    land->add_option("--samples", la.samples, "sphere samples to classify");
    land->add_option("--seed", la.seed, "sampling seed");
    land->add_flag("--analytic-identity", la.analytic_identity,
                   "use the first r identity columns as A");
    land->add_flag("--with-data", la.with_data, "also evaluate the finite-sample witness");
    land->add_option("--n", la.n, "samples for --with-data");
    land->add_option("--sigma", la.sigma, "Gaussian amplitude for --with-data");
    land->add_option("--out", la.out, "output directory");
    land->add_option("--config", la.config, "JSON config; flags override");

    CompareArgs ca;
    CLI::App* cmp = app.add_subcommand("compare", "paired quartic vs. ADM recovery");
    cmp->add_option("--p", ca.p, "ambient dimension");
    cmp->add_option("--r", ca.r, "number of dictionary columns");
    cmp->add_option("--n", ca.n, "number of samples");
    cmp->add_option("--theta", ca.theta, "sparsity level");
    cmp->add_option("--sigma", ca.sigma, "Gaussian amplitude scale");
    cmp->add_option("--seeds", ca.seeds, "number of paired seeds");
    cmp->add_option("--base-seed", ca.base_seed, "first seed");
    cmp->add_option("--kind", ca.kind, "orth | general");
    cmp->add_option("--out", ca.out, "output directory");
    cmp->add_option("--rho-e", ca.rho_e, "success threshold");
    cmp->add_option("--jobs", ca.jobs, "concurrent seeds");
    cmp->add_flag("--timing", ca.timing, "record wall times");
    ca.solver.attach(cmp);
    cmp->add_option("--adm-lambda", ca.adm_lambda, "ADM l1 penalty (0 = data-driven)");
    cmp->add_option("--adm-max-iters", ca.adm_max_iters, "ADM sweep cap");
    cmp->add_option("--adm-tol", ca.adm_tol, "ADM movement tolerance");
    cmp->add_option("--config", ca.config, "JSON config; flags override");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);  // prints help, exits 0
    } catch (const CLI::ParseError& e) {
        app.exit(e);  // prints the message
        return 2;
    }

    try {
        if (synth->parsed()) {
            const json cfg = load_config(sa.config);
            merge_config(*synth, cfg, "p", sa.p);
            merge_config(*synth, cfg, "r", sa.r);
            merge_config(*synth, cfg, "n", sa.n);
            merge_config(*synth, cfg, "theta", sa.theta);
            merge_config(*synth, cfg, "sigma", sa.sigma);
            merge_config(*synth, cfg, "seed", sa.seed);
            merge_config(*synth, cfg, "kind", sa.kind);
            merge_config(*synth, cfg, "out", sa.out);
            merge_config(*synth, cfg, "csv", sa.csv);
            return cmd_synth(sa);
        }
        if (dec->parsed()) {
            const json cfg = load_config(da.config);
            merge_config(*dec, cfg, "input", da.input);
            merge_config(*dec, cfg, "truth", da.truth);
            merge_config(*dec, cfg, "r", da.r);
            merge_config(*dec, cfg, "method", da.method);
            merge_config(*dec, cfg, "out", da.out);
            merge_config(*dec, cfg, "rho-e", da.rho_e);
            merge_config(*dec, cfg, "seed", da.seed);
            merge_config(*dec, cfg, "timing", da.timing);
            da.solver.merge(*dec, cfg);
            merge_config(*dec, cfg, "adm-lambda", da.adm_lambda);
            merge_config(*dec, cfg, "adm-max-iters", da.adm_max_iters);
            merge_config(*dec, cfg, "adm-tol", da.adm_tol);
            return cmd_decompose(da);
        }
        if (sw->parsed()) {
            const json cfg = load_config(wa.config);
            merge_config(*sw, cfg, "p", wa.p);
            merge_config(*sw, cfg, "r-values", wa.r_values);
            merge_config(*sw, cfg, "theta-values", wa.theta_values);
            merge_config(*sw, cfg, "n-values", wa.n_values);
            merge_config(*sw, cfg, "sigma", wa.sigma);
            merge_config(*sw, cfg, "trials", wa.trials);
            merge_config(*sw, cfg, "base-seed", wa.base_seed);
            merge_config(*sw, cfg, "mode", wa.mode);
            merge_config(*sw, cfg, "kind", wa.kind);
            merge_config(*sw, cfg, "out", wa.out);
            merge_config(*sw, cfg, "rho-e", wa.rho_e);
            merge_config(*sw, cfg, "jobs", wa.jobs);
            merge_config(*sw, cfg, "timing", wa.timing);
            merge_config(*sw, cfg, "paper-scale", wa.paper_scale);
            wa.solver.merge(*sw, cfg);
            merge_config(*sw, cfg, "adm-lambda", wa.adm_lambda);
            merge_config(*sw, cfg, "adm-max-iters", wa.adm_max_iters);
            merge_config(*sw, cfg, "adm-tol", wa.adm_tol);
            if (wa.paper_scale && sw->count("--trials") == 0 && !cfg.contains("trials"))
                wa.trials = 200;
            return cmd_sweep(wa);
        }
        if (land->parsed()) {
            const json cfg = load_config(la.config);
            merge_config(*land, cfg, "p", la.p);
            merge_config(*land, cfg, "r", la.r);
            merge_config(*land, cfg, "theta", la.theta);
            merge_config(*land, cfg, "c-star", la.c_star);
            merge_config(*land, cfg, "C-star", la.C_star);
            merge_config(*land, cfg, "samples", la.samples);
            merge_config(*land, cfg, "seed", la.seed);
            merge_config(*land, cfg, "analytic-identity", la.analytic_identity);
            merge_config(*land, cfg, "with-data", la.with_data);
            merge_config(*land, cfg, "n", la.n);
            merge_config(*land, cfg, "sigma", la.sigma);
            merge_config(*land, cfg, "out", la.out);
            return cmd_landscape(la);
        }
        if (cmp->parsed()) {
            const json cfg = load_config(ca.config);
            merge_config(*cmp, cfg, "p", ca.p);
            merge_config(*cmp, cfg, "r", ca.r);
            merge_config(*cmp, cfg, "n", ca.n);
            merge_config(*cmp, cfg, "theta", ca.theta);
            merge_config(*cmp, cfg, "sigma", ca.sigma);
            merge_config(*cmp, cfg, "seeds", ca.seeds);
            merge_config(*cmp, cfg, "base-seed", ca.base_seed);
            merge_config(*cmp, cfg, "kind", ca.kind);
            merge_config(*cmp, cfg, "out", ca.out);
            merge_config(*cmp, cfg, "rho-e", ca.rho_e);
            merge_config(*cmp, cfg, "jobs", ca.jobs);
            merge_config(*cmp, cfg, "timing", ca.timing);
            ca.solver.merge(*cmp, cfg);
            merge_config(*cmp, cfg, "adm-lambda", ca.adm_lambda);
            merge_config(*cmp, cfg, "adm-max-iters", ca.adm_max_iters);
            merge_config(*cmp, cfg, "adm-tol", ca.adm_tol);
            return cmd_compare(ca);
        }
        std::fprintf(stderr, "no subcommand selected\n");
        return 2;
    } catch (const IoError& e) {
        std::fprintf(stderr, "I/O error: %s\n", e.what());
        return 1;
    } catch (const InvalidArgument& e) {
        std::fprintf(stderr, "invalid argument: %s\n", e.what());
        return 2;
    } catch (const NumericalError& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "unexpected failure: %s\n", e.what());
        return 3;
    }
}
