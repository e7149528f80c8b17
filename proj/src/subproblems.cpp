#include "rsqp/subproblems.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>

namespace rsqp {

namespace {

// Dense tableau for the two-phase simplex. Variables are column indices;
// basis[r] is the variable basic in row r. Dead rows (redundant after
// phase 1) are skipped everywhere.
struct Tableau {
    int rows, cols;                 // cols excludes the rhs column
    std::vector<double> t;          // rows x (cols+1), row-major, last col = rhs
    std::vector<int> basis;
    std::vector<char> dead;

    Tableau(int r, int c) : rows(r), cols(c), t(static_cast<size_t>(r) * (c + 1), 0.0),
                            basis(r, -1), dead(r, 0) {}
    double& at(int r, int c_) { return t[static_cast<size_t>(r) * (cols + 1) + c_]; }
    double at(int r, int c_) const { return t[static_cast<size_t>(r) * (cols + 1) + c_]; }
    double& rhs(int r) { return t[static_cast<size_t>(r) * (cols + 1) + cols]; }
    double rhs(int r) const { return t[static_cast<size_t>(r) * (cols + 1) + cols]; }

    void pivot(int pr, int pc) {
        const double p = at(pr, pc);
        for (int j = 0; j <= cols; ++j) at(pr, j) /= p;
        at(pr, pc) = 1.0;
        for (int r = 0; r < rows; ++r) {
            if (r == pr) continue;
            const double f = at(r, pc);
            if (f == 0.0) continue;
            for (int j = 0; j <= cols; ++j) at(r, j) -= f * at(pr, j);
            at(r, pc) = 0.0;
            if (std::abs(rhs(r)) < 1e-13 * (1.0 + std::abs(f))) rhs(r) = 0.0;
        }
        basis[pr] = pc;
    }
};

// Reduced-cost row for cost vector cost[0..cols): obj[j] = cost[j] - sum of
// cost[basis[r]] * T[r][j].
Vec reduced_costs(const Tableau& tab, const Vec& cost) {
    Vec obj(cost);
    for (int r = 0; r < tab.rows; ++r) {
        if (tab.dead[r]) continue;
        const double cb = cost[tab.basis[r]];
        if (cb == 0.0) continue;
        for (int j = 0; j < tab.cols; ++j) obj[j] -= cb * tab.at(r, j);
    }
    return obj;
}

double objective_value(const Tableau& tab, const Vec& cost) {
    double z = 0.0;
    for (int r = 0; r < tab.rows; ++r)
        if (!tab.dead[r]) z += cost[tab.basis[r]] * tab.rhs(r);
    return z;
}

// Bland's rule: entering = lowest-index column with negative reduced cost,
// leaving = min ratio with ties broken by lowest basic variable index.
// Returns pivots performed; throws PivotLimit when the budget runs out.
int simplex_phase(Tableau& tab, const Vec& cost, const std::vector<char>& allowed, int& budget) {
    int pivots = 0;
    while (true) {
        Vec obj = reduced_costs(tab, cost);
        double obj_scale = 1.0;
        for (int j = 0; j < tab.cols; ++j) obj_scale = std::max(obj_scale, std::abs(obj[j]));
        const double tol_rc = 1e-11 * obj_scale;

        int enter = -1;
        for (int j = 0; j < tab.cols; ++j) {
            if (!allowed[j]) continue;
            bool is_basic = false;
            for (int r = 0; r < tab.rows; ++r)
                if (!tab.dead[r] && tab.basis[r] == j) { is_basic = true; break; }
            if (is_basic) continue;
            if (obj[j] < -tol_rc) { enter = j; break; }
        }
        if (enter < 0) return pivots;

        int leave = -1;
        double best_ratio = std::numeric_limits<double>::infinity();
        for (int r = 0; r < tab.rows; ++r) {
            if (tab.dead[r]) continue;
            const double a = tab.at(r, enter);
            const double tol_piv = 1e-11 * (1.0 + std::abs(a));
            if (a <= tol_piv) continue;
            const double ratio = tab.rhs(r) / a;
            if (ratio < best_ratio - 1e-15 * (1.0 + std::abs(best_ratio)) ||
                (std::abs(ratio - best_ratio) <= 1e-12 * (1.0 + std::abs(best_ratio)) &&
                 (leave < 0 || tab.basis[r] < tab.basis[leave]))) {
                best_ratio = ratio;
                leave = r;
            }
        }
        if (leave < 0)
            throw PivotLimit("simplex: unbounded pivot column (implementation bug)");
        tab.pivot(leave, enter);
        ++pivots;
        if (--budget < 0) throw PivotLimit("simplex: pivot budget exhausted");
    }
}

}  // namespace

RelaxationSolution solve_relaxation_lp(const Vec& c, const Mat& J, double delta) {
    assert(delta > 0.0);
    const int n = J.rows, m = static_cast<int>(c.size());
    assert(J.cols == m);

    // variables: u = d + Delta in [0, 2 Delta] (n of them), then rho >= 0,
    // then one slack per row, then artificials.
    // rows: m linearized constraints  J^T u - rho <= -c + Delta * rowsum,
    //       n upper bounds            u_j <= 2 Delta.
    const int rows = m + n;
    const int n_struct = n + 1;

    std::vector<double> b(rows);
    for (int i = 0; i < m; ++i) {
        double rowsum = 0.0;
        for (int j = 0; j < n; ++j) rowsum += J(j, i);
        b[i] = -c[i] + delta * rowsum;
    }
    for (int j = 0; j < n; ++j) b[m + j] = 2.0 * delta;

    std::vector<int> art_rows;
    for (int r = 0; r < rows; ++r)
        if (b[r] < 0.0) art_rows.push_back(r);
    const int n_art = static_cast<int>(art_rows.size());
    const int cols = n_struct + rows + n_art;

    Tableau tab(rows, cols);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < n; ++j) tab.at(i, j) = J(j, i);
        tab.at(i, n) = -1.0;  // -rho
    }
    for (int j = 0; j < n; ++j) tab.at(m + j, j) = 1.0;
    for (int r = 0; r < rows; ++r) {
        tab.at(r, n_struct + r) = 1.0;  // slack
        tab.rhs(r) = b[r];
        tab.basis[r] = n_struct + r;
    }
    for (int k = 0; k < n_art; ++k) {
        const int r = art_rows[k];
        for (int j = 0; j <= cols; ++j) tab.at(r, j) = -tab.at(r, j);
        tab.at(r, n_struct + rows + k) = 1.0;
        tab.basis[r] = n_struct + rows + k;
    }

    int budget = 50 * (n + m + 1);
    int pivots = 0;
    double scale = 1.0;
    for (int r = 0; r < rows; ++r) scale = std::max(scale, std::abs(tab.rhs(r)));

    std::vector<char> allowed(cols, 1);
    if (n_art > 0) {
        Vec cost1(cols, 0.0);
        for (int k = 0; k < n_art; ++k) cost1[n_struct + rows + k] = 1.0;
        pivots += simplex_phase(tab, cost1, allowed, budget);
        if (objective_value(tab, cost1) > 1e-7 * scale)
            throw PivotLimit("simplex: phase 1 failed on a feasible LP (implementation bug)");
        // drive zero-level artificials out of the basis
        for (int r = 0; r < rows; ++r) {
            if (tab.basis[r] < n_struct + rows) continue;
            int pc = -1;
            for (int j = 0; j < n_struct + rows; ++j)
                if (std::abs(tab.at(r, j)) > 1e-9) { pc = j; break; }
            if (pc >= 0) {
                tab.pivot(r, pc);
                ++pivots;
                if (--budget < 0) throw PivotLimit("simplex: pivot budget exhausted");
            } else {
                tab.dead[r] = 1;  // redundant row
            }
        }
    }

    Vec cost2(cols, 0.0);
    cost2[n] = 1.0;  // min rho
    for (int k = 0; k < n_art; ++k) allowed[n_struct + rows + k] = 0;
    pivots += simplex_phase(tab, cost2, allowed, budget);

    Vec value(cols, 0.0);
    for (int r = 0; r < rows; ++r)
        if (!tab.dead[r]) value[tab.basis[r]] = tab.rhs(r);

    RelaxationSolution sol;
    sol.rho = std::max(value[n], 0.0);
    sol.d.resize(n);
    for (int j = 0; j < n; ++j) sol.d[j] = value[j] - delta;
    sol.simplex_pivots = pivots;
    return sol;
}

namespace {

// Equality-constrained QP on the working set via the Schur complement
// S = A^T H^{-1} A (refactorized from scratch on every working-set change).
struct WorkingSet {
    const Mat& J;
    const Vec& c;
    double rho;
    const CholeskyFactor& Hchol;
    const Vec& Hin_g;

    std::vector<int> idx;
    std::vector<Vec> a;      // constraint gradients (columns of J)
    std::vector<Vec> Hin_a;  // H^{-1} a
    Vec lam;                 // multipliers aligned with idx
    Vec d;

    WorkingSet(const Mat& J_, const Vec& c_, double rho_, const CholeskyFactor& hc,
               const Vec& hg)
        : J(J_), c(c_), rho(rho_), Hchol(hc), Hin_g(hg) {
        d = Hin_g;
        for (double& v : d) v = -v;
    }

    Mat schur() const {
        const int w = static_cast<int>(idx.size());
        Mat S(w, w);
        for (int t = 0; t < w; ++t)
            for (int u = 0; u <= t; ++u) S(t, u) = S(u, t) = dot(a[t], Hin_a[u]);
        return S;
    }

    // Solve for multipliers and the step on the current working set.
    void resolve() {
        const int w = static_cast<int>(idx.size());
        if (w == 0) {
            lam.clear();
            d = Hin_g;
            for (double& v : d) v = -v;
            return;
        }
        Vec r(w);
        for (int t = 0; t < w; ++t) r[t] = -((rho - c[idx[t]]) + dot(a[t], Hin_g));
        lam = CholeskyFactor(schur(), 1e-10, true).solve(r);
        d = Hin_g;
        for (double& v : d) v = -v;
        for (int t = 0; t < w; ++t)
            for (size_t j = 0; j < d.size(); ++j) d[j] -= lam[t] * Hin_a[t][j];
    }

    void push(int i) {
        idx.push_back(i);
        a.push_back(J.col(i));
        Hin_a.push_back(Hchol.solve(a.back()));
    }

    void erase(int t) {
        idx.erase(idx.begin() + t);
        a.erase(a.begin() + t);
        Hin_a.erase(Hin_a.begin() + t);
    }
};

}  // namespace

QpSolution solve_direction_qp(const Vec& g, const Mat& H, const Vec& c, const Mat& J, double rho,
                              const std::vector<int>* warm_start) {
    const int m = static_cast<int>(c.size());
    const CholeskyFactor Hchol(H);  // propagates NotPositiveDefinite
    const Vec Hin_g = Hchol.solve(g);

    WorkingSet ws(J, c, rho, Hchol, Hin_g);
    int changes = 0;
    const int cap = 10 * (m + 1);
    const double feas_tol = 1e-10 * (1.0 + std::abs(rho) + norm_inf(c));

    auto in_ws = [&](int i) {
        return std::find(ws.idx.begin(), ws.idx.end(), i) != ws.idx.end();
    };

    // Add constraint i, resolving linear dependence by a dual exchange step:
    // express a_i = sum w_t a_t and drop the blocking constraint
    // argmin{lam_t / w_t : w_t > 0}. Returns false when i cannot be added.
    auto add_constraint = [&](int i, bool allow_exchange) -> bool {
        while (true) {
            ws.push(i);
            try {
                ws.resolve();
                ++changes;
                return true;
            } catch (const NotPositiveDefinite&) {
                ws.erase(static_cast<int>(ws.idx.size()) - 1);
            }
            if (!allow_exchange || ws.idx.empty()) return false;
            Vec hin_ai = Hchol.solve(J.col(i));
            const int w = static_cast<int>(ws.idx.size());
            Vec s(w);
            for (int t = 0; t < w; ++t) s[t] = dot(ws.a[t], hin_ai);
            Vec wcoef = CholeskyFactor(ws.schur(), 1e-10, true).solve(s);
            int drop = -1;
            double best = std::numeric_limits<double>::infinity();
            for (int t = 0; t < w; ++t)
                if (wcoef[t] > 1e-12) {
                    const double ratio = ws.lam[t] / wcoef[t];
                    if (ratio < best) { best = ratio; drop = t; }
                }
            if (drop < 0) {
                // no blocking constraint: the dependence coefficients are all
                // nonpositive, which certifies infeasibility only under exact
                // dependence. The QP is feasible by construction, so restart
                // from the incoming constraint alone and rebuild.
                while (!ws.idx.empty()) ws.erase(0);
                ws.resolve();
                if (++changes > cap) throw MaxActiveSetChanges("QP: working-set change budget");
                continue;
            }
            ws.erase(drop);
            ws.resolve();
            if (++changes > cap) throw MaxActiveSetChanges("QP: working-set change budget");
        }
    };

    auto purge_negative = [&]() {
        while (!ws.idx.empty()) {
            int worst = -1;
            double lmin = -1e-12;
            for (size_t t = 0; t < ws.idx.size(); ++t)
                if (ws.lam[t] < lmin) { lmin = ws.lam[t]; worst = static_cast<int>(t); }
            if (worst < 0) return;
            ws.erase(worst);
            ws.resolve();
            if (++changes > cap) throw MaxActiveSetChanges("QP: working-set change budget");
        }
    };

    if (warm_start) {
        for (int i : *warm_start)
            if (i >= 0 && i < m && !in_ws(i)) add_constraint(i, false);
        purge_negative();
    }

    while (true) {
        int imax = -1;
        double vmax = feas_tol;
        for (int i = 0; i < m; ++i) {
            if (in_ws(i)) continue;
            const double v = c[i] + dot(J.col(i), ws.d) - rho;
            if (v > vmax) { vmax = v; imax = i; }
        }
        if (imax < 0) break;
        if (changes > cap) throw MaxActiveSetChanges("QP: working-set change budget");
        if (!add_constraint(imax, true))
            throw MaxActiveSetChanges("QP: violated constraint with near-zero gradient");
        purge_negative();
    }

    QpSolution sol;
    sol.d = ws.d;
    sol.lambda.assign(m, 0.0);
    for (size_t t = 0; t < ws.idx.size(); ++t)
        sol.lambda[ws.idx[t]] = std::max(ws.lam[t], 0.0);
    sol.active = ws.idx;
    std::sort(sol.active.begin(), sol.active.end());
    sol.model_obj = dot(g, sol.d) + 0.5 * quad_form(H, sol.d);
    return sol;
}

}  // namespace rsqp
