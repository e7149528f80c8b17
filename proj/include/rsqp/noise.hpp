#pragma once

#include <cstdint>

#include "rsqp/problem.hpp"

namespace rsqp {

/// Bounded uniform noise injected into every function and derivative
/// evaluation. The four bounds cap, respectively, |f~ - f|, ||c~ - c||_inf,
/// ||g~ - g||_2 and ||J~^T - J^T||_inf (max row l1 norm of the transposed
/// Jacobian). A zero model reproduces exact evaluations bit-for-bit.
struct NoiseModel {
    double eps_f = 0.0;
    double eps_c = 0.0;
    double eps_g = 0.0;
    double eps_J = 0.0;
    uint64_t seed = 0;

    bool is_zero() const { return eps_f == 0.0 && eps_c == 0.0 && eps_g == 0.0 && eps_J == 0.0; }
};

/// Noisy counterpart of Evaluation. eval_index identifies the draw: the
/// perturbations are a pure function of (seed, eval_index, component), so
/// any evaluation can be replayed in isolation.
struct NoisyEvaluation {
    double f = 0.0;
    Vec g;
    Vec c;
    Mat J;  // n x m
    uint64_t eval_index = 0;
};

/// Function-evaluation bound eps1 for f and c, sqrt(eps1) for the
/// derivative bounds (the scaling of finite-difference gradient error).
/// The seed is left at 0 for the caller to fill in.
NoiseModel derive_eps(double eps1);

/// Evaluate the problem exactly, then add one fresh uniform draw per scalar
/// component. Per-component half-widths are eps_g/sqrt(n) for the gradient
/// and eps_J/n for Jacobian entries so the aggregate-norm bounds above hold,
/// not just componentwise ones.
NoisyEvaluation noisy_eval(const NoiseModel& model, const Problem& p, const Vec& x,
                           uint64_t eval_index);

namespace detail {
/// Counter-based uniform draw in [-1, 1): splitmix-style finalizer over the
/// (seed, stream, component) triple; stateless and order-independent.
double uniform_sym(uint64_t seed, uint64_t stream, uint64_t component);
}  // namespace detail

}  // namespace rsqp
