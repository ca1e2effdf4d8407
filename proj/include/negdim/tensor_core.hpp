#pragma once

// Dense complex linear algebra for small bipartite systems: a row-major
// square matrix type, a cyclic Jacobi eigensolver for Hermitian matrices,
// trace norm, Kronecker product, partial transpose and partial trace.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "negdim/errors.hpp"

namespace negdim {

using cplx = std::complex<double>;

namespace tol {
inline constexpr double herm = 1e-12;   // state Hermiticity (max abs element)
inline constexpr double trace = 1e-12;  // state normalisation
inline constexpr double psd = 1e-10;    // smallest admissible state eigenvalue
inline constexpr double eig = 1e-9;     // eigensolver residual/orthogonality
inline constexpr double eig_input = 1e-10;  // Hermiticity demanded by hermitian_eig
inline constexpr double ceil = 1e-9;    // slack before taking a ceiling
}  // namespace tol

class ComplexMatrix {
public:
    ComplexMatrix() = default;

    explicit ComplexMatrix(std::size_t dim) : dim_(dim), entries_(dim * dim) {}

    ComplexMatrix(std::size_t dim, std::vector<cplx> entries)
        : dim_(dim), entries_(std::move(entries)) {
        if (entries_.size() != dim_ * dim_) {
            throw DimensionMismatch("ComplexMatrix: expected " + std::to_string(dim_ * dim_) +
                                    " entries, got " + std::to_string(entries_.size()));
        }
    }

    ComplexMatrix(std::initializer_list<std::initializer_list<cplx>> rows) : dim_(rows.size()) {
        entries_.reserve(dim_ * dim_);
        for (const auto& row : rows) {
            if (row.size() != dim_) throw DimensionMismatch("ComplexMatrix: ragged initializer");
            entries_.insert(entries_.end(), row.begin(), row.end());
        }
    }

    static ComplexMatrix identity(std::size_t dim) {
        ComplexMatrix m(dim);
        for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
        return m;
    }

    static ComplexMatrix diagonal(std::span<const double> values) {
        ComplexMatrix m(values.size());
        for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
        return m;
    }

    static ComplexMatrix diagonal(std::initializer_list<double> values) {
        return diagonal(std::span<const double>(values.begin(), values.size()));
    }

    // |v><v|
    static ComplexMatrix outer(std::span<const cplx> v) {
        ComplexMatrix m(v.size());
        for (std::size_t r = 0; r < v.size(); ++r)
            for (std::size_t c = 0; c < v.size(); ++c) m(r, c) = v[r] * std::conj(v[c]);
        return m;
    }

    std::size_t dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return entries_.size(); }

    cplx& operator()(std::size_t r, std::size_t c) noexcept { return entries_[r * dim_ + c]; }
    const cplx& operator()(std::size_t r, std::size_t c) const noexcept {
        return entries_[r * dim_ + c];
    }

    std::span<cplx> entries() noexcept { return entries_; }
    std::span<const cplx> entries() const noexcept { return entries_; }

    ComplexMatrix adjoint() const {
        ComplexMatrix out(dim_);
        for (std::size_t r = 0; r < dim_; ++r)
            for (std::size_t c = 0; c < dim_; ++c) out(c, r) = std::conj((*this)(r, c));
        return out;
    }

    ComplexMatrix transpose() const {
        ComplexMatrix out(dim_);
        for (std::size_t r = 0; r < dim_; ++r)
            for (std::size_t c = 0; c < dim_; ++c) out(c, r) = (*this)(r, c);
        return out;
    }

    cplx trace() const noexcept {
        cplx t = 0.0;
        for (std::size_t i = 0; i < dim_; ++i) t += (*this)(i, i);
        return t;
    }

    double max_abs() const noexcept {
        double m = 0.0;
        for (const auto& z : entries_) m = std::max(m, std::abs(z));
        return m;
    }

    double frobenius_norm() const noexcept {
        double s = 0.0;
        for (const auto& z : entries_) s += std::norm(z);
        return std::sqrt(s);
    }

    // max |m - m^dagger|
    double hermitian_defect() const noexcept {
        double d = 0.0;
        for (std::size_t r = 0; r < dim_; ++r)
            for (std::size_t c = r; c < dim_; ++c)
                d = std::max(d, std::abs((*this)(r, c) - std::conj((*this)(c, r))));
        return d;
    }

    bool is_hermitian(double tolerance) const noexcept { return hermitian_defect() <= tolerance; }

    ComplexMatrix& operator+=(const ComplexMatrix& o) {
        require_same_dim(o);
        for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] += o.entries_[i];
        return *this;
    }
    ComplexMatrix& operator-=(const ComplexMatrix& o) {
        require_same_dim(o);
        for (std::size_t i = 0; i < entries_.size(); ++i) entries_[i] -= o.entries_[i];
        return *this;
    }
    ComplexMatrix& operator*=(cplx s) noexcept {
        for (auto& z : entries_) z *= s;
        return *this;
    }

    friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
    friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
    friend ComplexMatrix operator*(ComplexMatrix a, cplx s) { return a *= s; }
    friend ComplexMatrix operator*(cplx s, ComplexMatrix a) { return a *= s; }

    friend ComplexMatrix operator*(const ComplexMatrix& a, const ComplexMatrix& b) {
        a.require_same_dim(b);
        const std::size_t n = a.dim_;
        ComplexMatrix out(n);
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t k = 0; k < n; ++k) {
                const cplx ark = a(r, k);
                if (ark == cplx{}) continue;
                for (std::size_t c = 0; c < n; ++c) out(r, c) += ark * b(k, c);
            }
        return out;
    }

    friend bool operator==(const ComplexMatrix&, const ComplexMatrix&) = default;

private:
    void require_same_dim(const ComplexMatrix& o) const {
        if (o.dim_ != dim_) {
            throw DimensionMismatch("matrix dimensions differ: " + std::to_string(dim_) + " vs " +
                                    std::to_string(o.dim_));
        }
    }

    std::size_t dim_ = 0;
    std::vector<cplx> entries_;
};

inline double max_abs_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.dim() != b.dim()) throw DimensionMismatch("max_abs_diff: dimensions differ");
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a.entries()[i] - b.entries()[i]));
    return m;
}

// ---------------------------------------------------------------------------
// Hermitian eigensolver

struct EigenDecomposition {
    std::vector<double> values;  // ascending
    ComplexMatrix vectors;       // column i belongs to values[i]
};

// Cyclic Jacobi. Each rotation is the 2x2 unitary that zeroes the (p, q)
// pair: a phase turning a_pq real, followed by the classical real rotation.
inline EigenDecomposition hermitian_eig(const ComplexMatrix& m) {
    const std::size_t n = m.dim();
    const double scale = std::max(1.0, m.max_abs());
    if (const double defect = m.hermitian_defect(); defect > tol::eig_input * scale) {
        std::ostringstream msg;
        msg << "hermitian_eig: matrix is not Hermitian (max|m - m^dagger| = " << defect << ")";
        throw NotHermitian(msg.str());
    }

    ComplexMatrix a(n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) a(r, c) = 0.5 * (m(r, c) + std::conj(m(c, r)));
    ComplexMatrix v = ComplexMatrix::identity(n);

    const double frob = a.frobenius_norm();
    const std::size_t max_sweeps = std::max<std::size_t>(1, 100 * n * n);
    bool converged = frob == 0.0 || n < 2;
    for (std::size_t sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += std::norm(a(p, q));
        if (std::sqrt(off) <= 1e-15 * frob) {
            converged = true;
            break;
        }

        std::size_t rotations = 0;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const cplx apq = a(p, q);
                const double b = std::abs(apq);
                const double app = a(p, p).real();
                const double aqq = a(q, q).real();
                if (b == 0.0 || b <= 1e-18 * (std::abs(app) + std::abs(aqq))) {
                    a(p, q) = a(q, p) = 0.0;
                    continue;
                }
                ++rotations;
                const cplx phase = std::conj(apq) / b;  // e^{-i phi}
                const double zeta = (aqq - app) / (2.0 * b);
                const double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                const double pr = phase.real(), pi = phase.imag();
                // z * e^{-i phi} and z * e^{+i phi} in real arithmetic
                auto times_phase = [pr, pi](cplx z) {
                    return cplx(z.real() * pr - z.imag() * pi, z.real() * pi + z.imag() * pr);
                };
                auto times_conj_phase = [pr, pi](cplx z) {
                    return cplx(z.real() * pr + z.imag() * pi, z.imag() * pr - z.real() * pi);
                };

                for (std::size_t k = 0; k < n; ++k) {
                    const cplx akp = a(k, p), akq = times_phase(a(k, q));
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const cplx apk = a(p, k), aqk = times_conj_phase(a(q, k));
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                a(p, q) = a(q, p) = 0.0;
                a(p, p) = a(p, p).real();
                a(q, q) = a(q, q).real();
                for (std::size_t k = 0; k < n; ++k) {
                    const cplx vkp = v(k, p), vkq = times_phase(v(k, q));
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
        if (rotations == 0) converged = true;
    }
    if (!converged) throw NoConvergence("hermitian_eig: Jacobi sweep budget exhausted");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return a(i, i).real() < a(j, j).real(); });

    EigenDecomposition out{std::vector<double>(n), ComplexMatrix(n)};
    for (std::size_t c = 0; c < n; ++c) {
        out.values[c] = a(order[c], order[c]).real();
        for (std::size_t r = 0; r < n; ++r) out.vectors(r, c) = v(r, order[c]);
    }
    return out;
}

inline std::vector<double> hermitian_eigenvalues(const ComplexMatrix& m) {
    return hermitian_eig(m).values;
}

inline double min_eigenvalue(const ComplexMatrix& m) {
    if (m.dim() == 0) return 0.0;
    return hermitian_eig(m).values.front();
}

// V diag(f(lambda)) V^dagger
template <typename F>
ComplexMatrix spectral_map(const EigenDecomposition& e, F&& f) {
    const std::size_t n = e.vectors.dim();
    ComplexMatrix out(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double w = f(e.values[k]);
        if (w == 0.0) continue;
        for (std::size_t r = 0; r < n; ++r) {
            const cplx vr = w * e.vectors(r, k);
            for (std::size_t c = 0; c < n; ++c) out(r, c) += vr * std::conj(e.vectors(c, k));
        }
    }
    return out;
}

// Frobenius-nearest positive semidefinite matrix.
inline ComplexMatrix psd_projection(const ComplexMatrix& m) {
    return spectral_map(hermitian_eig(m), [](double l) { return l > 0.0 ? l : 0.0; });
}

// tr sqrt(M^dagger M). Hermitian input takes the sum of |eigenvalues|.
inline double trace_norm(const ComplexMatrix& m) {
    const double scale = std::max(1.0, m.max_abs());
    double sum = 0.0;
    if (m.hermitian_defect() <= tol::eig_input * scale) {
        for (double l : hermitian_eig(m).values) sum += std::abs(l);
    } else {
        for (double l : hermitian_eig(m.adjoint() * m).values) sum += std::sqrt(std::max(0.0, l));
    }
    return sum;
}

inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    const std::size_t na = a.dim(), nb = b.dim();
    ComplexMatrix out(na * nb);
    for (std::size_t ia = 0; ia < na; ++ia)
        for (std::size_t ja = 0; ja < na; ++ja) {
            const cplx aij = a(ia, ja);
            if (aij == cplx{}) continue;
            for (std::size_t ib = 0; ib < nb; ++ib)
                for (std::size_t jb = 0; jb < nb; ++jb)
                    out(ia * nb + ib, ja * nb + jb) = aij * b(ib, jb);
        }
    return out;
}

// <a, b>_HS = tr(a^dagger b)
inline cplx hs_inner(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.dim() != b.dim()) throw DimensionMismatch("hs_inner: dimensions differ");
    cplx s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a.entries()[i]) * b.entries()[i];
    return s;
}

inline double hs_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
    return (a - b).frobenius_norm();
}

// Transposes the first tensor factor of an operator on C^{d_a} (x) C^{d_b}.
inline ComplexMatrix partial_transpose(const ComplexMatrix& m, std::size_t d_a, std::size_t d_b) {
    if (m.dim() != d_a * d_b) {
        throw DimensionMismatch("partial_transpose: matrix dimension " + std::to_string(m.dim()) +
                                " != " + std::to_string(d_a) + "*" + std::to_string(d_b));
    }
    ComplexMatrix out(m.dim());
    for (std::size_t ai = 0; ai < d_a; ++ai)
        for (std::size_t ak = 0; ak < d_a; ++ak)
            for (std::size_t bj = 0; bj < d_b; ++bj)
                for (std::size_t bl = 0; bl < d_b; ++bl)
                    out(ai * d_b + bj, ak * d_b + bl) = m(ak * d_b + bj, ai * d_b + bl);
    return out;
}

enum class Party { A, B };

// Traces out `traced`; the result acts on the other party.
inline ComplexMatrix partial_trace(const ComplexMatrix& m, std::size_t d_a, std::size_t d_b,
                                   Party traced) {
    if (m.dim() != d_a * d_b) throw DimensionMismatch("partial_trace: dimension mismatch");
    if (traced == Party::B) {
        ComplexMatrix out(d_a);
        for (std::size_t i = 0; i < d_a; ++i)
            for (std::size_t k = 0; k < d_a; ++k)
                for (std::size_t j = 0; j < d_b; ++j) out(i, k) += m(i * d_b + j, k * d_b + j);
        return out;
    }
    ComplexMatrix out(d_b);
    for (std::size_t j = 0; j < d_b; ++j)
        for (std::size_t l = 0; l < d_b; ++l)
            for (std::size_t i = 0; i < d_a; ++i) out(j, l) += m(i * d_b + j, i * d_b + l);
    return out;
}

// ---------------------------------------------------------------------------

// A density matrix together with the factorisation of its Hilbert space.
// Construction validates Hermiticity, unit trace and positivity.
class BipartiteState {
public:
    BipartiteState(ComplexMatrix rho, std::size_t d_a, std::size_t d_b)
        : rho_(std::move(rho)), d_a_(d_a), d_b_(d_b) {
        validate();
    }

    const ComplexMatrix& rho() const noexcept { return rho_; }
    std::size_t d_a() const noexcept { return d_a_; }
    std::size_t d_b() const noexcept { return d_b_; }
    std::size_t dim() const noexcept { return rho_.dim(); }

    friend bool operator==(const BipartiteState&, const BipartiteState&) = default;

private:
    void validate() const {
        if (d_a_ == 0 || d_b_ == 0) throw InvalidDimension("BipartiteState: local dimension is 0");
        if (rho_.dim() != d_a_ * d_b_) {
            throw DimensionMismatch("BipartiteState: rho.dim (" + std::to_string(rho_.dim()) +
                                    ") != d_a*d_b (" + std::to_string(d_a_ * d_b_) + ")");
        }
        std::ostringstream msg;
        msg.precision(3);
        if (const double h = rho_.hermitian_defect(); h > tol::herm) {
            msg << "BipartiteState: rho not Hermitian, max|rho - rho^dagger| = " << h << " > "
                << tol::herm;
            throw InvalidState(msg.str());
        }
        if (const double t = std::abs(rho_.trace() - 1.0); t > tol::trace) {
            msg << "BipartiteState: |tr(rho) - 1| = " << t << " > " << tol::trace;
            throw InvalidState(msg.str());
        }
        if (const double l = min_eigenvalue(rho_); l < -tol::psd) {
            msg << "BipartiteState: rho not positive semidefinite, min eigenvalue = " << l << " < "
                << -tol::psd;
            throw InvalidState(msg.str());
        }
    }

    ComplexMatrix rho_;
    std::size_t d_a_;
    std::size_t d_b_;
};

inline ComplexMatrix partial_transpose(const BipartiteState& s) {
    return partial_transpose(s.rho(), s.d_a(), s.d_b());
}

}  // namespace negdim
