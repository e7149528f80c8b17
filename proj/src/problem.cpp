#include "rsqp/problem.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rsqp {

Evaluation eval_true(const Problem& p, const Vec& x) {
    Evaluation e;
    e.f = p.f(x);
    e.g = p.grad_f(x);
    e.c = p.c(x);
    e.J = p.jac_c(x);
    return e;
}

double violation(const Vec& c) {
    double v = 0.0;
    for (double ci : c) v = std::max(v, ci);
    return std::max(v, 0.0);
}

namespace {

// Region of an unstable constraint qualification: minimize x1 + x2 over
// x2^2 >= a2, 0.5 x2^2 + x1 x2 >= 0, x1 >= 0, x2 >= 0 with a2 = 1e-4.
// Solution (0, sqrt(a2)); near it the first two constraint gradients have
// entries of order 1e-2, so modest noise can make the linearization singular.
Problem make_mfcq_example() {
    constexpr double a2 = 1e-4;
    Problem p;
    p.name = "mfcq_example";
    p.n = 2;
    p.m = 4;
    p.f = [](const Vec& x) { return x[0] + x[1]; };
    p.grad_f = [](const Vec&) { return Vec{1.0, 1.0}; };
    p.c = [](const Vec& x) {
        return Vec{a2 - x[1] * x[1], -0.5 * x[1] * x[1] - x[0] * x[1], -x[0], -x[1]};
    };
    p.jac_c = [](const Vec& x) {
        Mat J(2, 4);
        J(0, 0) = 0.0;
        J(1, 0) = -2.0 * x[1];
        J(0, 1) = -x[1];
        J(1, 1) = -x[1] - x[0];
        J(0, 2) = -1.0;
        J(1, 2) = 0.0;
        J(0, 3) = 0.0;
        J(1, 3) = -1.0;
        return J;
    };
    p.x0 = {1.0, 1.0};
    p.reference = Reference{{0.0, 0.01}, 0.01, "paper"};
    return p;
}

// Quadratic objective, one linear constraint plus box bounds; solution sits
// on the lower x1 bound.
Problem make_hs21() {
    Problem p;
    p.name = "hs21";
    p.n = 2;
    p.m = 5;
    p.f = [](const Vec& x) { return 0.01 * x[0] * x[0] + x[1] * x[1] - 100.0; };
    p.grad_f = [](const Vec& x) { return Vec{0.02 * x[0], 2.0 * x[1]}; };
    p.c = [](const Vec& x) {
        return Vec{10.0 - 10.0 * x[0] + x[1], 2.0 - x[0], x[0] - 50.0, -x[1] - 50.0, x[1] - 50.0};
    };
    p.jac_c = [](const Vec&) {
        Mat J(2, 5);
        J(0, 0) = -10.0;
        J(1, 0) = 1.0;
        J(0, 1) = -1.0;
        J(1, 1) = 0.0;
        J(0, 2) = 1.0;
        J(1, 2) = 0.0;
        J(0, 3) = 0.0;
        J(1, 3) = -1.0;
        J(0, 4) = 0.0;
        J(1, 4) = 1.0;
        return J;
    };
    p.x0 = {-1.0, -1.0};
    p.reference = Reference{{2.0, 0.0}, -99.96, "derived"};
    return p;
}

// Convex QP with one linear coupling constraint and nonnegativity bounds.
Problem make_hs35() {
    Problem p;
    p.name = "hs35";
    p.n = 3;
    p.m = 4;
    p.f = [](const Vec& x) {
        return 9.0 - 8.0 * x[0] - 6.0 * x[1] - 4.0 * x[2] + 2.0 * x[0] * x[0] +
               2.0 * x[1] * x[1] + x[2] * x[2] + 2.0 * x[0] * x[1] + 2.0 * x[0] * x[2];
    };
    p.grad_f = [](const Vec& x) {
        return Vec{-8.0 + 4.0 * x[0] + 2.0 * x[1] + 2.0 * x[2], -6.0 + 4.0 * x[1] + 2.0 * x[0],
                   -4.0 + 2.0 * x[2] + 2.0 * x[0]};
    };
    p.c = [](const Vec& x) { return Vec{x[0] + x[1] + 2.0 * x[2] - 3.0, -x[0], -x[1], -x[2]}; };
    p.jac_c = [](const Vec&) {
        Mat J(3, 4);
        J(0, 0) = 1.0;
        J(1, 0) = 1.0;
        J(2, 0) = 2.0;
        J(0, 1) = -1.0;
        J(1, 2) = -1.0;
        J(2, 3) = -1.0;
        return J;
    };
    p.x0 = {0.5, 0.5, 0.5};
    p.reference = Reference{{4.0 / 3.0, 7.0 / 9.0, 4.0 / 9.0}, 1.0 / 9.0, "derived"};
    return p;
}

// Nonconvex product objective over an ellipsoid.
Problem make_hs29() {
    Problem p;
    p.name = "hs29";
    p.n = 3;
    p.m = 1;
    p.f = [](const Vec& x) { return -x[0] * x[1] * x[2]; };
    p.grad_f = [](const Vec& x) {
        return Vec{-x[1] * x[2], -x[0] * x[2], -x[0] * x[1]};
    };
    p.c = [](const Vec& x) {
        return Vec{x[0] * x[0] + 2.0 * x[1] * x[1] + 4.0 * x[2] * x[2] - 48.0};
    };
    p.jac_c = [](const Vec& x) {
        Mat J(3, 1);
        J(0, 0) = 2.0 * x[0];
        J(1, 0) = 4.0 * x[1];
        J(2, 0) = 8.0 * x[2];
        return J;
    };
    p.x0 = {1.0, 1.0, 1.0};
    p.reference = Reference{{4.0, 2.0 * std::sqrt(2.0), 2.0}, -16.0 * std::sqrt(2.0), "derived"};
    return p;
}

// Rosen-Suzuki: quadratic objective, three convex quadratic constraints,
// two active at the solution.
Problem make_hs43() {
    Problem p;
    p.name = "hs43";
    p.n = 4;
    p.m = 3;
    p.f = [](const Vec& x) {
        return x[0] * x[0] + x[1] * x[1] + 2.0 * x[2] * x[2] + x[3] * x[3] - 5.0 * x[0] -
               5.0 * x[1] - 21.0 * x[2] + 7.0 * x[3];
    };
    p.grad_f = [](const Vec& x) {
        return Vec{2.0 * x[0] - 5.0, 2.0 * x[1] - 5.0, 4.0 * x[2] - 21.0, 2.0 * x[3] + 7.0};
    };
    p.c = [](const Vec& x) {
        const double q = x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + x[3] * x[3];
        return Vec{q + x[0] - x[1] + x[2] - x[3] - 8.0,
                   q + x[1] * x[1] + x[3] * x[3] - x[0] - x[3] - 10.0,
                   q + x[0] * x[0] - x[3] * x[3] + 2.0 * x[0] - x[1] - x[3] - 5.0};
    };
    p.jac_c = [](const Vec& x) {
        Mat J(4, 3);
        J(0, 0) = 2.0 * x[0] + 1.0;
        J(1, 0) = 2.0 * x[1] - 1.0;
        J(2, 0) = 2.0 * x[2] + 1.0;
        J(3, 0) = 2.0 * x[3] - 1.0;
        J(0, 1) = 2.0 * x[0] - 1.0;
        J(1, 1) = 4.0 * x[1];
        J(2, 1) = 2.0 * x[2];
        J(3, 1) = 4.0 * x[3] - 1.0;
        J(0, 2) = 4.0 * x[0] + 2.0;
        J(1, 2) = 2.0 * x[1] - 1.0;
        J(2, 2) = 2.0 * x[2];
        J(3, 2) = -1.0;
        return J;
    };
    p.x0 = {0.0, 0.0, 0.0, 0.0};
    p.reference = Reference{{0.0, 1.0, 2.0, -1.0}, -44.0, "derived"};
    return p;
}

// Convex QP with three general linear constraints and nonnegativity bounds.
Problem make_hs76() {
    Problem p;
    p.name = "hs76";
    p.n = 4;
    p.m = 7;
    p.f = [](const Vec& x) {
        return x[0] * x[0] + 0.5 * x[1] * x[1] + x[2] * x[2] + 0.5 * x[3] * x[3] - x[0] * x[2] +
               x[2] * x[3] - x[0] - 3.0 * x[1] + x[2] - x[3];
    };
    p.grad_f = [](const Vec& x) {
        return Vec{2.0 * x[0] - x[2] - 1.0, x[1] - 3.0, 2.0 * x[2] - x[0] + x[3] + 1.0,
                   x[3] + x[2] - 1.0};
    };
    p.c = [](const Vec& x) {
        return Vec{x[0] + 2.0 * x[1] + x[2] + x[3] - 5.0,
                   3.0 * x[0] + x[1] + 2.0 * x[2] - x[3] - 4.0,
                   1.5 - x[1] - 4.0 * x[2],
                   -x[0],
                   -x[1],
                   -x[2],
                   -x[3]};
    };
    p.jac_c = [](const Vec&) {
        Mat J(4, 7);
        J(0, 0) = 1.0;
        J(1, 0) = 2.0;
        J(2, 0) = 1.0;
        J(3, 0) = 1.0;
        J(0, 1) = 3.0;
        J(1, 1) = 1.0;
        J(2, 1) = 2.0;
        J(3, 1) = -1.0;
        J(1, 2) = -1.0;
        J(2, 2) = -4.0;
        J(0, 3) = -1.0;
        J(1, 4) = -1.0;
        J(2, 5) = -1.0;
        J(3, 6) = -1.0;
        return J;
    };
    p.x0 = {0.5, 0.5, 0.5, 0.5};
    p.reference =
        Reference{{3.0 / 11.0, 23.0 / 11.0, 0.0, 6.0 / 11.0}, -1133.0 / 242.0, "derived"};
    return p;
}

// Chebyshev center of the triangle with vertices (0,0), (4,0), (0,3):
// maximize the radius r of a ball fitting inside all three edges. Linear
// objective and constraints; incircle radius 1 at center (1,1).
Problem make_chebyshev_triangle() {
    Problem p;
    p.name = "chebyshev_triangle";
    p.n = 3;
    p.m = 4;
    p.f = [](const Vec& x) { return -x[2]; };
    p.grad_f = [](const Vec&) { return Vec{0.0, 0.0, -1.0}; };
    p.c = [](const Vec& x) {
        return Vec{x[2] - x[0], x[2] - x[1], (3.0 * x[0] + 4.0 * x[1] - 12.0) / 5.0 + x[2],
                   -x[2]};
    };
    p.jac_c = [](const Vec&) {
        Mat J(3, 4);
        J(0, 0) = -1.0;
        J(2, 0) = 1.0;
        J(1, 1) = -1.0;
        J(2, 1) = 1.0;
        J(0, 2) = 0.6;
        J(1, 2) = 0.8;
        J(2, 2) = 1.0;
        J(2, 3) = -1.0;
        return J;
    };
    p.x0 = {1.0, 0.5, 0.1};
    p.reference = Reference{{1.0, 1.0, 1.0}, -1.0, "derived"};
    return p;
}

}  // namespace

const std::vector<Problem>& corpus() {
    static const std::vector<Problem> problems = [] {
        std::vector<Problem> v;
        v.push_back(make_mfcq_example());
        v.push_back(make_hs21());
        v.push_back(make_hs35());
        v.push_back(make_hs29());
        v.push_back(make_hs43());
        v.push_back(make_hs76());
        v.push_back(make_chebyshev_triangle());
        return v;
    }();
    return problems;
}

const Problem& find_problem(const std::string& name) {
    for (const Problem& p : corpus())
        if (p.name == name) return p;
    throw std::invalid_argument("unknown problem: " + name);
}

}  // namespace rsqp
