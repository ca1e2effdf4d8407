#pragma once

// Small dense real linear-algebra kernels used by the moment-space solver:
// orthonormalisation with rank detection, orthogonal complements, LU and
// Cholesky solves. Vectors are plain std::vector<double>.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "negdim/errors.hpp"

namespace negdim::detail {

using Vec = std::vector<double>;

inline double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline void axpy(double a, const Vec& x, Vec& y) {
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

// Orthonormal basis of span(vectors), chosen greedily by largest residual
// (rank revealing). Stops once every residual is below rel_tol * max input
// norm, or after `max_rank` picks.
inline std::vector<Vec> span_basis(std::vector<Vec> residual, double rel_tol,
                                   std::size_t max_rank = static_cast<std::size_t>(-1)) {
    std::vector<Vec> basis;
    double scale = 0.0;
    for (const auto& v : residual) scale = std::max(scale, norm(v));
    if (scale == 0.0) return basis;
    std::vector<double> n2(residual.size());
    for (std::size_t i = 0; i < residual.size(); ++i) n2[i] = dot(residual[i], residual[i]);
    std::vector<bool> used(residual.size(), false);
    while (basis.size() < max_rank) {
        std::size_t best = residual.size();
        double best_n2 = 0.0;
        for (std::size_t i = 0; i < residual.size(); ++i)
            if (!used[i] && n2[i] > best_n2) {
                best_n2 = n2[i];
                best = i;
            }
        if (best == residual.size() || std::sqrt(best_n2) <= rel_tol * scale) break;
        used[best] = true;
        Vec q = residual[best];
        // re-orthogonalise against the accepted basis to keep it orthonormal
        for (const auto& b : basis) axpy(-dot(b, q), b, q);
        const double qn = norm(q);
        if (qn <= rel_tol * scale) continue;
        for (auto& x : q) x /= qn;
        for (std::size_t i = 0; i < residual.size(); ++i) {
            if (used[i]) continue;
            axpy(-dot(q, residual[i]), q, residual[i]);
            n2[i] = dot(residual[i], residual[i]);
        }
        basis.push_back(std::move(q));
    }
    return basis;
}

// Orthonormal basis of the orthogonal complement of span(q) in R^dim; q must
// be orthonormal.
inline std::vector<Vec> orthogonal_complement(const std::vector<Vec>& q, std::size_t dim) {
    if (q.size() >= dim) return {};
    std::vector<Vec> candidates(dim, Vec(dim, 0.0));
    for (std::size_t i = 0; i < dim; ++i) {
        candidates[i][i] = 1.0;
        for (const auto& b : q) axpy(-b[i], b, candidates[i]);
    }
    return span_basis(std::move(candidates), 1e-10, dim - q.size());
}

// Rows a_k with right-hand sides e_k, orthonormalised in order. Dependent rows
// are dropped; the largest right-hand-side mismatch among them is recorded so
// callers can detect inconsistent systems.
struct RowSystem {
    std::vector<Vec> rows;
    Vec rhs;
    double inconsistency = 0.0;
};

inline RowSystem orthonormalize_rows(const std::vector<Vec>& rows, const Vec& rhs, double rel_tol) {
    RowSystem out;
    for (std::size_t k = 0; k < rows.size(); ++k) {
        Vec r = rows[k];
        double e = rhs[k];
        const double original = norm(r);
        if (original == 0.0) {
            out.inconsistency = std::max(out.inconsistency, std::abs(e));
            continue;
        }
        for (int pass = 0; pass < 2; ++pass)
            for (std::size_t j = 0; j < out.rows.size(); ++j) {
                const double c = dot(out.rows[j], r);
                axpy(-c, out.rows[j], r);
                e -= c * out.rhs[j];
            }
        const double rn = norm(r);
        if (rn <= rel_tol * original) {
            out.inconsistency = std::max(out.inconsistency, std::abs(e));
            continue;
        }
        for (auto& x : r) x /= rn;
        out.rows.push_back(std::move(r));
        out.rhs.push_back(e / rn);
    }
    return out;
}

// Dense LU with partial pivoting for repeated solves with one matrix.
class LuSolver {
public:
    explicit LuSolver(std::vector<Vec> a) : lu_(std::move(a)), perm_(lu_.size()) {
        const std::size_t n = lu_.size();
        std::iota(perm_.begin(), perm_.end(), 0);
        for (std::size_t k = 0; k < n; ++k) {
            std::size_t piv = k;
            for (std::size_t i = k + 1; i < n; ++i)
                if (std::abs(lu_[i][k]) > std::abs(lu_[piv][k])) piv = i;
            if (lu_[piv][k] == 0.0) throw NoConvergence("LuSolver: singular matrix");
            std::swap(lu_[k], lu_[piv]);
            std::swap(perm_[k], perm_[piv]);
            for (std::size_t i = k + 1; i < n; ++i) {
                const double f = lu_[i][k] / lu_[k][k];
                lu_[i][k] = f;
                for (std::size_t j = k + 1; j < n; ++j) lu_[i][j] -= f * lu_[k][j];
            }
        }
    }

    Vec solve(const Vec& b) const {
        const std::size_t n = lu_.size();
        Vec x(n);
        for (std::size_t i = 0; i < n; ++i) {
            double s = b[perm_[i]];
            for (std::size_t j = 0; j < i; ++j) s -= lu_[i][j] * x[j];
            x[i] = s;
        }
        for (std::size_t i = n; i-- > 0;) {
            double s = x[i];
            for (std::size_t j = i + 1; j < n; ++j) s -= lu_[i][j] * x[j];
            x[i] = s / lu_[i][i];
        }
        return x;
    }

private:
    std::vector<Vec> lu_;
    std::vector<std::size_t> perm_;
};

// Cholesky factor of a symmetric positive definite matrix (row-major, dense).
class CholeskySolver {
public:
    CholeskySolver() = default;

    explicit CholeskySolver(const std::vector<Vec>& a) : n_(a.size()), l_(n_ * n_, 0.0) {
        for (std::size_t i = 0; i < n_; ++i)
            for (std::size_t j = 0; j <= i; ++j) {
                double s = a[i][j];
                for (std::size_t k = 0; k < j; ++k) s -= l_[i * n_ + k] * l_[j * n_ + k];
                if (i == j) {
                    if (s <= 0.0) throw NoConvergence("CholeskySolver: matrix not positive definite");
                    l_[i * n_ + i] = std::sqrt(s);
                } else {
                    l_[i * n_ + j] = s / l_[j * n_ + j];
                }
            }
    }

    Vec solve(const Vec& b) const {
        Vec y(b);
        for (std::size_t i = 0; i < n_; ++i) {
            double s = y[i];
            for (std::size_t k = 0; k < i; ++k) s -= l_[i * n_ + k] * y[k];
            y[i] = s / l_[i * n_ + i];
        }
        for (std::size_t i = n_; i-- > 0;) {
            double s = y[i];
            for (std::size_t k = i + 1; k < n_; ++k) s -= l_[k * n_ + i] * y[k];
            y[i] = s / l_[i * n_ + i];
        }
        return y;
    }

private:
    std::size_t n_ = 0;
    std::vector<double> l_;
};

}  // namespace negdim::detail
