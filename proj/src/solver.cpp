#include "rsqp/solver.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>

namespace rsqp {

std::string to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::BudgetExhausted: return "budget-exhausted";
        case SolveStatus::DqpTolerance: return "dqp-tolerance";
        case SolveStatus::SubproblemFailure: return "subproblem-failure";
    }
    return "unknown";
}

double merit_value(double f_tilde, const Vec& c_tilde, double pi) {
    return f_tilde + pi * violation(c_tilde);
}

ModelReduction model_reduction(const Vec& g, const Mat& H, const Vec& d, double pi, const Vec& c,
                               const Mat& J) {
    ModelReduction r;
    const Vec cd = add_scaled(c, 1.0, matT_vec(J, d));
    r.lin_viol_red = violation(c) - violation(cd);
    const double quad_term = dot(g, d) + 0.5 * quad_form(H, d);
    r.quad_red = -quad_term + pi * r.lin_viol_red;
    return r;
}

namespace {
// The penalty condition: quadratic merit-model reduction covers a theta1
// fraction of the penalized linear violation reduction.
bool penalty_condition(double pi, double quad_term, double lin_red, double theta1) {
    return -quad_term + pi * lin_red >= theta1 * pi * lin_red;
}
}  // namespace

double update_penalty(double pi_k, double quad_term, double lin_viol_red, double theta1) {
    assert(lin_viol_red > 0.0);
    if (penalty_condition(pi_k, quad_term, lin_viol_red, theta1)) return pi_k;
    double pi = std::max(1.1 * pi_k, quad_term / ((1.0 - theta1) * lin_viol_red));
    // land exactly on the closed form, then nudge up by ulps if rounding
    // left the condition unsatisfied
    for (int i = 0; i < 64 && !penalty_condition(pi, quad_term, lin_viol_red, theta1); ++i)
        pi = std::nextafter(pi * (1.0 + 1e-16), std::numeric_limits<double>::infinity());
    return pi;
}

LineSearchResult line_search(const std::function<NoisyEvaluation(const Vec&)>& oracle,
                             const Vec& x, const Vec& d, double pi, double merit_at_x,
                             double quad_red, double eps_R, double theta2, int max_backtracks) {
    LineSearchResult res;
    double alpha = 1.0;
    for (int j = 0; j <= max_backtracks; ++j, alpha *= 0.5) {
        const Vec trial = add_scaled(x, alpha, d);
        NoisyEvaluation ev = oracle(trial);
        const double merit_trial = merit_value(ev.f, ev.c, pi);
        res.alpha = alpha;
        res.eval = std::move(ev);
        res.backtracks = j;
        res.merit_trial = merit_trial;
        if (merit_at_x - merit_trial >= theta2 * alpha * quad_red - 2.0 * eps_R) return res;
    }
    res.hit_limit = true;  // smallest trial step is kept
    return res;
}

Vec estimate_multipliers(const Vec& g, const Vec& c, const Mat& J, double active_tol) {
    const int m = static_cast<int>(c.size());
    std::vector<int> act;
    for (int i = 0; i < m; ++i)
        if (c[i] >= -active_tol) act.push_back(i);
    Vec lambda(m, 0.0);
    if (act.empty()) return lambda;

    Mat A(J.rows, static_cast<int>(act.size()));
    for (size_t t = 0; t < act.size(); ++t)
        for (int r = 0; r < J.rows; ++r) A(r, static_cast<int>(t)) = J(r, act[t]);
    Vec b(g);
    for (double& v : b) v = -v;
    const Vec lam_act = nnls(A, b);
    for (size_t t = 0; t < act.size(); ++t) lambda[act[t]] = lam_act[t];
    return lambda;
}

BfgsResult bfgs_update(const Mat& H, const Vec& s, const Vec& y, double eps_g, double eps_J,
                       double lambda_inf, double qn_damping) {
    BfgsResult res{H, true};
    const double s_norm = norm2(s);
    if (s_norm == 0.0) return res;
    const Vec Hs = mat_vec(H, s);
    const double sHs = dot(s, Hs);
    const double sy = dot(y, s);
    if (sy < qn_damping * sHs) return res;
    if (sy < (eps_g + lambda_inf * eps_J) * s_norm) return res;

    const int n = H.rows;
    Mat Hn = H;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            Hn(i, j) += -Hs[i] * Hs[j] / sHs + y[i] * y[j] / sy;
    try {
        CholeskyFactor check(Hn);  // PD predicate
    } catch (const NotPositiveDefinite&) {
        return res;  // should be unreachable when the conditions hold
    }
    res.H = std::move(Hn);
    res.skipped = false;
    return res;
}

StationarityMeasures stationarity_measures(double v_tilde, double rho, const QpSolution& qp) {
    return {v_tilde - rho, -qp.model_obj};
}

size_t select_final_index(const std::vector<IterRecord>& trace, int window) {
    assert(!trace.empty());
    const size_t len = trace.size();
    const size_t start = window > 0 && static_cast<size_t>(window) < len
                             ? len - static_cast<size_t>(window)
                             : 0;
    // violations at roundoff level compare as zero so a converged iterate
    // cannot lose to an earlier interior point on float dirt
    auto vfloor = [](double v) { return v <= 1e-12 ? 0.0 : v; };
    size_t best = start;
    for (size_t i = start + 1; i < len; ++i) {
        const IterRecord& r = trace[i];
        const IterRecord& b = trace[best];
        const double rv = vfloor(r.v_tilde), bv = vfloor(b.v_tilde);
        if (rv < bv || (rv == bv && r.f_tilde < b.f_tilde) ||
            (rv == bv && r.f_tilde == b.f_tilde))
            best = i;  // later k wins ties
    }
    return best;
}

Vec select_final(const std::vector<IterRecord>& trace, int window) {
    return trace[select_final_index(trace, window)].x;
}

SolverReport solve(const Problem& p, const NoiseModel& model, const SolverConfig& cfg,
                   const IterationObserver& observer) {
    SolverReport report;
    report.final_pi = cfg.pi0;
    report.x_final = p.x0;
    if (cfg.max_iter <= 0) return report;

    uint64_t eval_counter = 0;
    auto fresh_eval = [&](const Vec& y) { return noisy_eval(model, p, y, eval_counter++); };

    Vec x = p.x0;
    NoisyEvaluation ev = fresh_eval(x);
    Mat H = Mat::identity(p.n);
    double pi = cfg.pi0;

    for (int k = 0; k < cfg.max_iter; ++k) {
        RelaxationSolution rel;
        QpSolution qp;
        try {
            rel = solve_relaxation_lp(ev.c, ev.J, cfg.delta);
            // warm start: rows the relaxation holds at the level rho
            std::vector<int> warm;
            const Vec lin = add_scaled(ev.c, 1.0, matT_vec(ev.J, rel.d));
            for (int i = 0; i < p.m; ++i)
                if (std::abs(lin[i] - rel.rho) <= 1e-9 * (1.0 + std::abs(rel.rho)))
                    warm.push_back(i);
            qp = solve_direction_qp(ev.g, H, ev.c, ev.J, rel.rho, &warm);
        } catch (const SolverError&) {
            report.status = SolveStatus::SubproblemFailure;
            break;
        }

        const double v_tilde = violation(ev.c);
        const StationarityMeasures sm = stationarity_measures(v_tilde, rel.rho, qp);

        if (cfg.dqp_stop_tol > 0.0 && norm2(qp.d) <= cfg.dqp_stop_tol) {
            IterRecord rec{k, x, ev.f, v_tilde, pi, 0.0, rel.rho,
                           sm.psi_v_tilde, sm.psi_o_tilde, false, 0};
            report.trace.push_back(rec);
            if (observer) {
                const double merit_x = merit_value(ev.f, ev.c, pi);
                observer(IterationScope{k, x, ev, rel, qp, pi, pi, 0.0, 0.0,
                                        model.eps_f + pi * model.eps_c, merit_x, merit_x, 0.0, 0,
                                        false, H, H, false, false});
            }
            report.status = SolveStatus::DqpTolerance;
            break;
        }

        const double quad_term = qp.model_obj;
        const Vec lin_c = add_scaled(ev.c, 1.0, matT_vec(ev.J, qp.d));
        const double lin_viol_red = v_tilde - violation(lin_c);

        const double pi_before = pi;
        if (v_tilde - rel.rho > 1e-12 * (1.0 + v_tilde))
            pi = update_penalty(pi, quad_term, lin_viol_red, cfg.theta1);
        const double quad_red = -quad_term + pi * lin_viol_red;

        const double eps_R = model.eps_f + pi * model.eps_c;
        const double merit_x = merit_value(ev.f, ev.c, pi);
        const LineSearchResult ls = line_search(fresh_eval, x, qp.d, pi, merit_x, quad_red, eps_R,
                                                cfg.theta2, cfg.ls_max_backtracks);

        const Vec x_next = add_scaled(x, ls.alpha, qp.d);
        const NoisyEvaluation& ev_next = ls.eval;

        const double active_tol = model.eps_c + 1e-8 * (1.0 + norm_inf(ev_next.c));
        Vec lambda;
        try {
            lambda = estimate_multipliers(ev_next.g, ev_next.c, ev_next.J, active_tol);
        } catch (const IterationLimit&) {
            lambda = qp.lambda;  // multipliers of the direction QP
        }

        // curvature pair: s = alpha d, y = Lagrangian-gradient difference at
        // the new multipliers
        const Vec s = add_scaled(Vec(p.n, 0.0), ls.alpha, qp.d);
        Vec y = add_scaled(ev_next.g, 1.0, mat_vec(ev_next.J, lambda));
        const Vec y_old = add_scaled(ev.g, 1.0, mat_vec(ev.J, lambda));
        for (int j = 0; j < p.n; ++j) y[j] -= y_old[j];

        BfgsResult up = bfgs_update(H, s, y, model.eps_g, model.eps_J, norm_inf(lambda),
                                    cfg.qn_damping);

        IterRecord rec{k, x, ev.f, v_tilde, pi, ls.alpha, rel.rho,
                       sm.psi_v_tilde, sm.psi_o_tilde, up.skipped, ls.backtracks};
        report.trace.push_back(rec);
        if (up.skipped) ++report.qn_skip_count;

        if (observer)
            observer(IterationScope{k, x, ev, rel, qp, pi_before, pi, quad_red, lin_viol_red,
                                    eps_R, merit_x, ls.merit_trial, ls.alpha, ls.backtracks,
                                    ls.hit_limit, H, up.H, up.skipped, true});

        x = x_next;
        ev = ev_next;
        H = std::move(up.H);
    }

    report.final_pi = pi;
    if (!report.trace.empty()) report.x_final = select_final(report.trace, cfg.window);
    return report;
}

}  // namespace rsqp
