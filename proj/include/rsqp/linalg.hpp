#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace rsqp {

using Vec = std::vector<double>;

/// Base class for all recoverable numerical failures raised by the solver
/// kernels. The SQP driver converts these into a subproblem-failure status.
struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A Cholesky pivot fell below the relative floor: the matrix is not
/// positive definite to working precision.
struct NotPositiveDefinite : SolverError {
    using SolverError::SolverError;
};

/// An active-set loop exceeded its pass budget (degenerate input).
struct IterationLimit : SolverError {
    using SolverError::SolverError;
};

/// Dense row-major matrix. Sized for problems with n, m < 100; no sparse
/// storage.
struct Mat {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;  // row-major, data.size() == rows*cols

    Mat() = default;
    Mat(int r, int c, double fill = 0.0)
        : rows(r), cols(c), data(static_cast<size_t>(r) * c, fill) {}

    double& operator()(int i, int j) { return data[static_cast<size_t>(i) * cols + j]; }
    double operator()(int i, int j) const { return data[static_cast<size_t>(i) * cols + j]; }

    static Mat identity(int n) {
        Mat I(n, n);
        for (int i = 0; i < n; ++i) I(i, i) = 1.0;
        return I;
    }

    Vec col(int j) const {
        Vec v(rows);
        for (int i = 0; i < rows; ++i) v[i] = (*this)(i, j);
        return v;
    }

    /// |A(i,j) - A(j,i)| <= tol * max(1, |A(i,j)|) for all i, j.
    bool is_symmetric(double tol = 1e-12) const;
};

// Small dense helpers shared by the subproblem solvers.
double dot(const Vec& a, const Vec& b);
double norm2(const Vec& a);
double norm_inf(const Vec& a);
Vec add_scaled(const Vec& a, double t, const Vec& b);  // a + t*b
Vec mat_vec(const Mat& A, const Vec& x);               // A x
Vec matT_vec(const Mat& A, const Vec& x);              // A^T x
double quad_form(const Mat& A, const Vec& x);          // x^T A x

/// Cholesky factorization A = L L^T of a symmetric positive-definite matrix.
/// The factor is reusable for repeated solves against the same matrix.
///
/// Throws NotPositiveDefinite when a pivot drops to or below
/// pivot_floor_rel * max-diagonal (default 1e-14), which doubles as the PD
/// predicate for quasi-Newton matrices. With per_column_floor the pivot is
/// instead compared against its own column's diagonal entry, a
/// scale-invariant dependence test for Gram matrices whose diagonal spans
/// many orders of magnitude.
class CholeskyFactor {
public:
    explicit CholeskyFactor(const Mat& A, double pivot_floor_rel = 1e-14,
                            bool per_column_floor = false);

    Vec solve(const Vec& b) const;
    int size() const { return n_; }

private:
    int n_;
    std::vector<double> lower_;  // row-major lower triangle, full n*n storage
};

/// Solve A x = b for symmetric positive-definite A.
Vec spd_solve(const Mat& A, const Vec& b);

/// Nonnegative least squares: minimize ||A x - b||_2 subject to x >= 0,
/// Lawson-Hanson active set. Throws IterationLimit after 3*cols passes.
Vec nnls(const Mat& A, const Vec& b);

}  // namespace rsqp
