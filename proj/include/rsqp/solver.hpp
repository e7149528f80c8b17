#pragma once

#include <functional>
#include <string>
#include <vector>

#include "rsqp/noise.hpp"
#include "rsqp/problem.hpp"
#include "rsqp/subproblems.hpp"

namespace rsqp {

/// Parameters of the SQP loop. Defaults follow the reference experimental
/// setup: theta1 = 0.1, theta2 = 0.01, a fixed trust region Delta = 1e3,
/// a 1000-iteration budget and final-point selection over the last 100
/// iterates. dqp_stop_tol = 0 disables the early stop; callers enable
/// 1e-8 for noiseless runs only.
struct SolverConfig {
    double theta1 = 0.1;
    double theta2 = 0.01;
    double delta = 1e3;
    double pi0 = 1.0;
    int max_iter = 1000;
    int ls_max_backtracks = 30;
    int window = 100;
    double qn_damping = 1e-3;  // curvature floor as a fraction of s^T H s
    double dqp_stop_tol = 0.0;
};

/// One row of the iteration trace. x is the iterate at the start of the
/// iteration; f_tilde/v_tilde are its noisy objective and violation; pi is
/// the penalty after the update step; psi_v_tilde and psi_o_tilde are the
/// noisy stationarity measures for feasibility and optimality.
struct IterRecord {
    int k = 0;
    Vec x;
    double f_tilde = 0.0;
    double v_tilde = 0.0;
    double pi = 0.0;
    double alpha = 0.0;
    double rho = 0.0;
    double psi_v_tilde = 0.0;
    double psi_o_tilde = 0.0;
    bool qn_skipped = false;
    int ls_backtracks = 0;
};

enum class SolveStatus { BudgetExhausted, DqpTolerance, SubproblemFailure };

std::string to_string(SolveStatus s);

struct SolverReport {
    std::vector<IterRecord> trace;
    Vec x_final;
    double final_pi = 0.0;
    int qn_skip_count = 0;
    SolveStatus status = SolveStatus::BudgetExhausted;
};

/// Exact penalty merit f~ + pi * ||max(c~, 0)||_inf.
double merit_value(double f_tilde, const Vec& c_tilde, double pi);

/// Reductions achieved by step d in the models of the merit function:
/// lin_viol_red = ||max(c,0)||_inf - ||max(c + J^T d, 0)||_inf  and
/// quad_red = -(g^T d + 1/2 d^T H d) + pi * lin_viol_red.
struct ModelReduction {
    double quad_red = 0.0;
    double lin_viol_red = 0.0;
};
ModelReduction model_reduction(const Vec& g, const Mat& H, const Vec& d, double pi, const Vec& c,
                               const Mat& J);

/// Smallest penalty >= pi_k making the quadratic model reduction cover a
/// theta1 fraction of the penalized linearized-violation reduction. Returns
/// pi_k unchanged when it already qualifies, otherwise
/// max(1.1 pi_k, quad_term / ((1 - theta1) lin_viol_red)), nudged up by ulps
/// if needed so the returned value satisfies the condition exactly in
/// floating point. Call only with lin_viol_red > 0.
double update_penalty(double pi_k, double quad_term, double lin_viol_red, double theta1);

struct LineSearchResult {
    double alpha = 1.0;
    NoisyEvaluation eval;  // evaluation at the accepted trial point
    int backtracks = 0;
    bool hit_limit = false;
    double merit_trial = 0.0;
};

/// Backtracking line search with noise relaxation: accept the first
/// alpha = 2^-j with
///     merit(x) - merit(x + alpha d) >= theta2 * alpha * quad_red - 2 eps_R,
/// where each trial point gets one fresh noisy evaluation. When no
/// j <= max_backtracks qualifies, the smallest trial step is taken and the
/// result is flagged.
LineSearchResult line_search(const std::function<NoisyEvaluation(const Vec&)>& oracle,
                             const Vec& x, const Vec& d, double pi, double merit_at_x,
                             double quad_red, double eps_R, double theta2, int max_backtracks);

/// Least-squares multipliers over the near-active columns
/// {i : c_i >= -active_tol}: nonnegative lambda minimizing
/// ||g + sum lambda_i grad c_i||_2, zero elsewhere. Propagates
/// IterationLimit from nnls.
Vec estimate_multipliers(const Vec& g, const Vec& c, const Mat& J, double active_tol);

struct BfgsResult {
    Mat H;
    bool skipped = false;
};

/// Noise-aware BFGS update. Applies the standard update only when both
///     y^T s >= qn_damping * s^T H s   and   y^T s >= (eps_g + lambda_inf * eps_J) ||s||
/// hold and the updated matrix passes the Cholesky PD predicate; otherwise
/// returns H unchanged with skipped = true.
BfgsResult bfgs_update(const Mat& H, const Vec& s, const Vec& y, double eps_g, double eps_J,
                       double lambda_inf, double qn_damping);

/// Noisy stationarity measures of one iteration: psi_v = v~ - rho (linear
/// model reduction of the violation) and psi_o = -(g~^T d + 1/2 d^T H d)
/// (objective-model reduction over the relaxed linearized feasible set).
struct StationarityMeasures {
    double psi_v_tilde = 0.0;
    double psi_o_tilde = 0.0;
};
StationarityMeasures stationarity_measures(double v_tilde, double rho, const QpSolution& qp);

/// Among the last `window` records, the x of the record with minimal noisy
/// violation; ties broken by minimal noisy objective, then by larger k.
Vec select_final(const std::vector<IterRecord>& trace, int window);
size_t select_final_index(const std::vector<IterRecord>& trace, int window);

/// Per-iteration hook for tests and diagnostics; receives every quantity
/// the loop produced for iteration k. `stepped` is false for the final
/// short-circuit iteration triggered by dqp_stop_tol.
struct IterationScope {
    int k;
    const Vec& x;
    const NoisyEvaluation& ev;
    const RelaxationSolution& rel;
    const QpSolution& qp;
    double pi_before;
    double pi_after;
    double quad_red;
    double lin_viol_red;
    double eps_R;
    double merit_at_x;
    double merit_at_trial;
    double alpha;
    int backtracks;
    bool backtrack_limit;
    const Mat& H_before;
    const Mat& H_after;
    bool qn_skipped;
    bool stepped;
};
using IterationObserver = std::function<void(const IterationScope&)>;

/// Run the relaxed SQP loop on one problem under one noise model.
SolverReport solve(const Problem& p, const NoiseModel& model, const SolverConfig& cfg,
                   const IterationObserver& observer = nullptr);

}  // namespace rsqp
