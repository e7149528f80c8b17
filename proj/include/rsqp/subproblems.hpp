#pragma once

#include <vector>

#include "rsqp/linalg.hpp"

namespace rsqp {

/// The simplex exceeded its pivot budget. The relaxation LP is always
/// feasible and bounded, so this indicates an implementation bug.
struct PivotLimit : SolverError {
    using SolverError::SolverError;
};

/// The QP active-set loop exceeded its change budget (degeneracy/cycling).
struct MaxActiveSetChanges : SolverError {
    using SolverError::SolverError;
};

/// Solution of the relaxation LP
///
///     min rho  s.t.  c + J^T d <= rho * 1,  rho >= 0,  ||d||_inf <= Delta.
///
/// rho is the optimal common relaxation level; d is one minimizer (the
/// simplex basis reached under Bland's rule, no secondary objective).
struct RelaxationSolution {
    double rho = 0.0;
    Vec d;
    int simplex_pivots = 0;
};

/// Solution of the direction QP
///
///     min g^T d + 1/2 d^T H d  s.t.  c + J^T d <= rho * 1
///
/// with H positive definite. lambda holds the KKT multipliers (zero off the
/// active set); model_obj is g^T d + 1/2 d^T H d at the minimizer.
struct QpSolution {
    Vec d;
    Vec lambda;
    std::vector<int> active;
    double model_obj = 0.0;
};

/// Dense two-phase simplex with Bland's anti-cycling rule. Throws PivotLimit
/// after 50*(n+m+1) pivots. Optimality is certified by dual feasibility of
/// the final basis (all reduced costs nonnegative at exit).
RelaxationSolution solve_relaxation_lp(const Vec& c, const Mat& J, double delta);

/// Active-set method of dual (Goldfarb-Idnani) type: start from the
/// unconstrained minimum -H^{-1}g, repeatedly add the most violated
/// constraint and drop constraints with negative multipliers. Linearly
/// dependent additions are resolved by a dual exchange step with dependence
/// tolerance 1e-10. Throws MaxActiveSetChanges after 10*(m+1) working-set
/// changes and propagates NotPositiveDefinite from the H factorization.
/// warm_start, when given, seeds the working set (e.g. the relaxation LP's
/// active rows).
QpSolution solve_direction_qp(const Vec& g, const Mat& H, const Vec& c, const Mat& J, double rho,
                              const std::vector<int>* warm_start = nullptr);

}  // namespace rsqp
