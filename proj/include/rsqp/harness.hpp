#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "rsqp/solver.hpp"

namespace rsqp {

/// One experiment grid: problems x noise levels x seeds, a shared solver
/// configuration, and whether runs may execute concurrently (per-run
/// determinism is independent of scheduling).
struct ExperimentSpec {
    std::vector<std::string> problem_names;        // empty = whole corpus
    std::vector<double> eps1_levels = {0.0, 1e-8, 1e-6, 1e-4, 1e-2};
    std::vector<uint64_t> seeds = {1, 2, 3};
    SolverConfig config;
    bool parallel = true;
};

/// One grid cell's outcome. v_final and f_err are computed with the exact
/// oracle at the selected final point; noise never touches the reported
/// ground-truth metrics. f_err is empty when the problem has no reference.
struct RunRow {
    std::string problem;
    double eps1 = 0.0;
    uint64_t seed = 0;
    double v_final = 0.0;
    std::optional<double> f_err;
    double final_pi = 0.0;
    int qn_skips = 0;
    int first_hit = 0;
    int iters = 0;
    std::string status;
};

/// First iteration whose recorded noisy violation and objective are within
/// 2 eps_f of the selected final record's values; `window` is the final-point
/// selection window.
int first_hit_iteration(const std::vector<IterRecord>& trace, double eps_f, int window = 100);

/// Run one grid cell: derive the noise model from eps1 with the given seed,
/// solve, and assemble the row (exact metrics via eval_true).
RunRow run_single(const Problem& p, double eps1, uint64_t seed, const SolverConfig& cfg);

/// Run the whole grid. Rows come back ordered by (problem, eps1, seed)
/// regardless of parallelism; per-run failures are recorded in the status
/// column and never abort the grid.
std::vector<RunRow> run_experiment(const ExperimentSpec& spec);

/// results.csv content: fixed header, 17-significant-digit decimals,
/// LF line endings, empty field for missing f_err.
std::string render_csv(const std::vector<RunRow>& rows);

/// Self-contained SVG log-log line chart of per-problem medians over seeds
/// against eps1 (zero-noise rows are skipped; values are floored at 1e-16
/// for the log axis). metric is "v_final", "f_err" or "final_pi".
std::string render_svg(const std::vector<RunRow>& rows, const std::string& metric);

/// Write results.csv and the three SVG charts into out_dir.
/// Throws std::runtime_error with path context on IO failure.
void emit_outputs(const std::vector<RunRow>& rows, const std::filesystem::path& out_dir);

}  // namespace rsqp
