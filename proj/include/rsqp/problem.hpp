#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rsqp/linalg.hpp"

namespace rsqp {

/// Known solution of a test problem together with where the value comes
/// from: "paper" for values quoted from the source material of a problem,
/// "derived" for values reproduced by the noiseless solver and cross-checked
/// against the KKT conditions.
struct Reference {
    Vec x;
    double f = 0.0;
    std::string provenance;  // "paper" | "derived"
};

/// An inequality-constrained nonlinear program
///
///     minimize f(x)  subject to  c(x) <= 0,  c: R^n -> R^m,
///
/// with exact analytic derivatives. The Jacobian is stored n x m with
/// column i = grad c_i, so J^T d gives the constraint linearization.
struct Problem {
    std::string name;
    int n = 0;
    int m = 0;
    std::function<double(const Vec&)> f;
    std::function<Vec(const Vec&)> grad_f;
    std::function<Vec(const Vec&)> c;
    std::function<Mat(const Vec&)> jac_c;
    Vec x0;
    std::optional<Reference> reference;
};

/// Exact values of f, grad f, c and the Jacobian at one point.
struct Evaluation {
    double f = 0.0;
    Vec g;
    Vec c;
    Mat J;  // n x m
};

Evaluation eval_true(const Problem& p, const Vec& x);

/// Constraint violation ||max(c, 0)||_inf; zero exactly on the feasible set.
double violation(const Vec& c);

/// The built-in analytic test corpus (inequality constraints only, n, m < 100).
const std::vector<Problem>& corpus();

/// Look up a corpus problem by name; throws std::invalid_argument if absent.
const Problem& find_problem(const std::string& name);

}  // namespace rsqp
