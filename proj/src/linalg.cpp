#include "rsqp/linalg.hpp"

#include <algorithm>
#include <cassert>
#include <limits>

namespace rsqp {

bool Mat::is_symmetric(double tol) const {
    if (rows != cols) return false;
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < i; ++j) {
            const double a = (*this)(i, j), b = (*this)(j, i);
            if (std::abs(a - b) > tol * std::max(1.0, std::abs(a))) return false;
        }
    return true;
}

double dot(const Vec& a, const Vec& b) {
    assert(a.size() == b.size());
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

double norm_inf(const Vec& a) {
    double s = 0.0;
    for (double x : a) s = std::max(s, std::abs(x));
    return s;
}

Vec add_scaled(const Vec& a, double t, const Vec& b) {
    assert(a.size() == b.size());
    Vec r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + t * b[i];
    return r;
}

Vec mat_vec(const Mat& A, const Vec& x) {
    assert(static_cast<int>(x.size()) == A.cols);
    Vec y(A.rows, 0.0);
    for (int i = 0; i < A.rows; ++i) {
        double s = 0.0;
        for (int j = 0; j < A.cols; ++j) s += A(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

Vec matT_vec(const Mat& A, const Vec& x) {
    assert(static_cast<int>(x.size()) == A.rows);
    Vec y(A.cols, 0.0);
    for (int i = 0; i < A.rows; ++i)
        for (int j = 0; j < A.cols; ++j) y[j] += A(i, j) * x[i];
    return y;
}

double quad_form(const Mat& A, const Vec& x) { return dot(x, mat_vec(A, x)); }

CholeskyFactor::CholeskyFactor(const Mat& A, double pivot_floor_rel, bool per_column_floor)
    : n_(A.rows) {
    if (A.rows != A.cols) throw std::invalid_argument("CholeskyFactor: matrix not square");
    if (!A.is_symmetric(1e-10)) throw std::invalid_argument("CholeskyFactor: matrix not symmetric");
    double max_diag = 0.0;
    for (int i = 0; i < n_; ++i) max_diag = std::max(max_diag, std::abs(A(i, i)));
    const double global_floor = pivot_floor_rel * std::max(max_diag, 1e-300);

    lower_.assign(static_cast<size_t>(n_) * n_, 0.0);
    auto L = [&](int i, int j) -> double& { return lower_[static_cast<size_t>(i) * n_ + j]; };
    for (int j = 0; j < n_; ++j) {
        double d = A(j, j);
        for (int k = 0; k < j; ++k) d -= L(j, k) * L(j, k);
        const double floor = per_column_floor
                                 ? pivot_floor_rel * std::max(std::abs(A(j, j)), 1e-300)
                                 : global_floor;
        if (d <= floor)
            throw NotPositiveDefinite("Cholesky pivot " + std::to_string(d) + " at index " +
                                      std::to_string(j) + " below floor " + std::to_string(floor));
        const double ljj = std::sqrt(d);
        L(j, j) = ljj;
        for (int i = j + 1; i < n_; ++i) {
            double s = A(i, j);
            for (int k = 0; k < j; ++k) s -= L(i, k) * L(j, k);
            L(i, j) = s / ljj;
        }
    }
}

Vec CholeskyFactor::solve(const Vec& b) const {
    assert(static_cast<int>(b.size()) == n_);
    auto L = [&](int i, int j) { return lower_[static_cast<size_t>(i) * n_ + j]; };
    Vec y(n_);
    for (int i = 0; i < n_; ++i) {
        double s = b[i];
        for (int k = 0; k < i; ++k) s -= L(i, k) * y[k];
        y[i] = s / L(i, i);
    }
    Vec x(n_);
    for (int i = n_ - 1; i >= 0; --i) {
        double s = y[i];
        for (int k = i + 1; k < n_; ++k) s -= L(k, i) * x[k];
        x[i] = s / L(i, i);
    }
    return x;
}

Vec spd_solve(const Mat& A, const Vec& b) { return CholeskyFactor(A).solve(b); }

namespace {

// Least squares on the passive columns via normal equations. Throws
// NotPositiveDefinite when the selected columns are linearly dependent.
Vec ls_on_subset(const Mat& A, const Vec& b, const std::vector<int>& idx) {
    const int k = static_cast<int>(idx.size());
    Mat G(k, k);
    Vec rhs(k, 0.0);
    for (int p = 0; p < k; ++p) {
        for (int q = 0; q <= p; ++q) {
            double s = 0.0;
            for (int i = 0; i < A.rows; ++i) s += A(i, idx[p]) * A(i, idx[q]);
            G(p, q) = G(q, p) = s;
        }
        for (int i = 0; i < A.rows; ++i) rhs[p] += A(i, idx[p]) * b[i];
    }
    return CholeskyFactor(G, 1e-13).solve(rhs);
}

}  // namespace

Vec nnls(const Mat& A, const Vec& b) {
    const int m = A.cols;
    Vec x(m, 0.0);
    if (m == 0) return x;
    std::vector<int> passive;
    std::vector<char> in_passive(m, 0), banned(m, 0);

    Vec atb = matT_vec(A, b);
    const double tol_w = 1e-10 * (1.0 + norm_inf(atb));
    const int max_passes = 3 * m;

    for (int pass = 0; pass < max_passes; ++pass) {
        // gradient of 1/2||Ax-b||^2 is A^T(Ax-b); w = -grad
        Vec r = b;
        Vec ax = mat_vec(A, x);
        for (size_t i = 0; i < r.size(); ++i) r[i] -= ax[i];
        Vec w = matT_vec(A, r);

        int jstar = -1;
        double wbest = tol_w;
        for (int j = 0; j < m; ++j)
            if (!in_passive[j] && !banned[j] && w[j] > wbest) {
                wbest = w[j];
                jstar = j;
            }
        if (jstar < 0) return x;

        passive.push_back(jstar);
        in_passive[jstar] = 1;

        // inner loop: restore feasibility of the passive-set LS solution
        while (true) {
            Vec z;
            try {
                z = ls_on_subset(A, b, passive);
            } catch (const NotPositiveDefinite&) {
                // dependent addition: back it out and skip this candidate
                in_passive[passive.back()] = 0;
                banned[passive.back()] = 1;
                passive.pop_back();
                break;
            }
            double zmin = std::numeric_limits<double>::infinity();
            for (double v : z) zmin = std::min(zmin, v);
            if (zmin > 0.0) {
                std::fill(x.begin(), x.end(), 0.0);
                for (size_t p = 0; p < passive.size(); ++p) x[passive[p]] = z[p];
                std::fill(banned.begin(), banned.end(), 0);
                break;
            }
            // interpolate toward z until the first component hits zero
            double alpha = 1.0;
            for (size_t p = 0; p < passive.size(); ++p)
                if (z[p] <= 0.0) {
                    const double xi = x[passive[p]];
                    if (xi - z[p] > 0.0) alpha = std::min(alpha, xi / (xi - z[p]));
                }
            for (size_t p = 0; p < passive.size(); ++p)
                x[passive[p]] += alpha * (z[p] - x[passive[p]]);
            // drop components that reached zero
            std::vector<int> kept;
            for (int j : passive) {
                if (x[j] > 1e-14 * (1.0 + norm_inf(x))) {
                    kept.push_back(j);
                } else {
                    x[j] = 0.0;
                    in_passive[j] = 0;
                }
            }
            if (kept.size() == passive.size()) {
                // numerical stall: force-drop the most negative z component
                int worst = -1;
                double zworst = 0.0;
                for (size_t p = 0; p < passive.size(); ++p)
                    if (z[p] <= zworst) {
                        zworst = z[p];
                        worst = passive[p];
                    }
                if (worst >= 0) {
                    x[worst] = 0.0;
                    in_passive[worst] = 0;
                    kept.erase(std::remove(kept.begin(), kept.end(), worst), kept.end());
                }
            }
            passive = std::move(kept);
            if (passive.empty()) break;
        }
    }
    throw IterationLimit("nnls: active-set pass budget exhausted (" + std::to_string(max_passes) +
                         " passes)");
}

}  // namespace rsqp
