#pragma once

// Moment matrices chi_{ij,kl}[rho] = tr[rho (A_k^dagger A_i (x) B_l^dagger B_j)]
// of a two-party measurement scenario, their index partial transpose, the
// variational form of the negativity, and the linear structure (relations)
// that every moment matrix of a given device satisfies.

#include <cmath>
#include <cstddef>
#include <sstream>
#include <utility>
#include <vector>

#include "negdim/detail/real_linalg.hpp"
#include "negdim/errors.hpp"
#include "negdim/negativity.hpp"
#include "negdim/tensor_core.hpp"

namespace negdim {

// Local operators of both parties. Index 0 is the identity on each side.
class MeasurementSet {
public:
    MeasurementSet(std::vector<ComplexMatrix> ops_a, std::vector<ComplexMatrix> ops_b)
        : ops_a_(std::move(ops_a)), ops_b_(std::move(ops_b)) {
        check(ops_a_, "A");
        check(ops_b_, "B");
    }

    const std::vector<ComplexMatrix>& ops_a() const noexcept { return ops_a_; }
    const std::vector<ComplexMatrix>& ops_b() const noexcept { return ops_b_; }
    std::size_t m_a() const noexcept { return ops_a_.size() - 1; }
    std::size_t m_b() const noexcept { return ops_b_.size() - 1; }
    std::size_t d_a() const noexcept { return ops_a_.front().dim(); }
    std::size_t d_b() const noexcept { return ops_b_.front().dim(); }

private:
    static void check(const std::vector<ComplexMatrix>& ops, const char* party) {
        if (ops.empty()) throw InvalidScenario(std::string("MeasurementSet: no operators for party ") + party);
        const std::size_t d = ops.front().dim();
        if (d == 0 || ops.front() != ComplexMatrix::identity(d)) {
            throw InvalidScenario(std::string("MeasurementSet: operator 0 of party ") + party +
                                  " must be the identity");
        }
        for (const auto& op : ops)
            if (op.dim() != d) {
                throw DimensionMismatch(std::string("MeasurementSet: operators of party ") + party +
                                        " have different dimensions");
            }
    }

    std::vector<ComplexMatrix> ops_a_;
    std::vector<ComplexMatrix> ops_b_;
};

// Qubit operator lists whose pairwise products span all 2x2 matrices, so the
// moment matrix determines a two-qubit state.
inline std::vector<ComplexMatrix> qubit_pauli_ops() {
    const cplx i(0.0, 1.0);
    return {ComplexMatrix::identity(2), ComplexMatrix{{0.0, 1.0}, {1.0, 0.0}}, ComplexMatrix{{0.0, -i}, {i, 0.0}},
            ComplexMatrix{{1.0, 0.0}, {0.0, -1.0}}};
}

// I and the projectors onto |0>, |+>, |+i>.
inline std::vector<ComplexMatrix> qubit_projector_ops() {
    const double h = 0.5;
    return {ComplexMatrix::identity(2), ComplexMatrix{{1.0, 0.0}, {0.0, 0.0}}, ComplexMatrix{{h, h}, {h, h}},
            ComplexMatrix{{cplx(h, 0), cplx(0, -h)}, {cplx(0, h), cplx(h, 0)}}};
}

// Composite index (i, j) -> i * (m_b + 1) + j.
struct MomentMatrix {
    std::size_t m_a = 0;
    std::size_t m_b = 0;
    ComplexMatrix entries;

    std::size_t index(std::size_t i, std::size_t j) const noexcept { return i * (m_b + 1) + j; }
    const cplx& operator()(std::size_t i, std::size_t j, std::size_t k, std::size_t l) const noexcept {
        return entries(index(i, j), index(k, l));
    }
    cplx& operator()(std::size_t i, std::size_t j, std::size_t k, std::size_t l) noexcept {
        return entries(index(i, j), index(k, l));
    }
};

inline std::size_t moment_dim(std::size_t m_a, std::size_t m_b) { return (m_a + 1) * (m_b + 1); }

// Moment matrix of an arbitrary operator on C^{d_a} (x) C^{d_b}; linear in rho.
inline MomentMatrix moment_matrix(const ComplexMatrix& rho, const MeasurementSet& m) {
    const std::size_t da = m.d_a(), db = m.d_b();
    if (rho.dim() != da * db) throw DimensionMismatch("moment_matrix: operator dimensions do not match state");
    const std::size_t na = m.m_a() + 1, nb = m.m_b() + 1;
    // prod_a[i*na + k] = A_k^dagger A_i
    std::vector<ComplexMatrix> prod_a, prod_b;
    for (std::size_t i = 0; i < na; ++i)
        for (std::size_t k = 0; k < na; ++k) prod_a.push_back(m.ops_a()[k].adjoint() * m.ops_a()[i]);
    for (std::size_t j = 0; j < nb; ++j)
        for (std::size_t l = 0; l < nb; ++l) prod_b.push_back(m.ops_b()[l].adjoint() * m.ops_b()[j]);

    // Partially contract rho with each B product first:
    // R_jl(a, a') = sum_{b,b'} rho(a b, a' b') Y(b', b)
    std::vector<ComplexMatrix> reduced;
    reduced.reserve(nb * nb);
    for (const auto& y : prod_b) {
        ComplexMatrix r(da);
        for (std::size_t a = 0; a < da; ++a)
            for (std::size_t ap = 0; ap < da; ++ap) {
                cplx s = 0.0;
                for (std::size_t b = 0; b < db; ++b)
                    for (std::size_t bp = 0; bp < db; ++bp) s += rho(a * db + b, ap * db + bp) * y(bp, b);
                r(a, ap) = s;
            }
        reduced.push_back(std::move(r));
    }

    MomentMatrix out{m.m_a(), m.m_b(), ComplexMatrix(na * nb)};
    for (std::size_t i = 0; i < na; ++i)
        for (std::size_t k = 0; k < na; ++k) {
            const auto& x = prod_a[i * na + k];
            for (std::size_t j = 0; j < nb; ++j)
                for (std::size_t l = 0; l < nb; ++l) {
                    const auto& r = reduced[j * nb + l];
                    cplx s = 0.0;
                    for (std::size_t a = 0; a < da; ++a)
                        for (std::size_t ap = 0; ap < da; ++ap) s += r(a, ap) * x(ap, a);
                    out(i, j, k, l) = s;
                }
        }
    return out;
}

inline MomentMatrix moment_matrix(const BipartiteState& s, const MeasurementSet& m) {
    if (s.d_a() != m.d_a() || s.d_b() != m.d_b()) {
        throw DimensionMismatch("moment_matrix: measurement operators do not act on the state's factors");
    }
    return moment_matrix(s.rho(), m);
}

// Swaps the A indices: out((i,j),(k,l)) = in((k,j),(i,l)).
inline ComplexMatrix moment_partial_transpose(const ComplexMatrix& c, std::size_t m_a, std::size_t m_b) {
    return partial_transpose(c, m_a + 1, m_b + 1);
}

inline MomentMatrix moment_partial_transpose(const MomentMatrix& c) {
    return {c.m_a, c.m_b, moment_partial_transpose(c.entries, c.m_a, c.m_b)};
}

// ---------------------------------------------------------------------------

struct VariationalNegativity {
    double value = 0.0;
    ComplexMatrix sigma;  // minimiser: sigma^{T_A} >= 0 and (rho + sigma)^{T_A} >= 0
};

// N(rho) = min { tr sigma : sigma^{T_A} >= 0, (rho + sigma)^{T_A} >= 0 }.
// The minimiser is the partial transpose of the negative part Q of
// rho^{T_A} = P - Q.
inline VariationalNegativity variational_negativity(const BipartiteState& s) {
    const auto e = hermitian_eig(partial_transpose(s));
    const ComplexMatrix q = spectral_map(e, [](double l) { return l < 0.0 ? -l : 0.0; });
    ComplexMatrix sigma = partial_transpose(q, s.d_a(), s.d_b());
    double value = 0.0;
    for (double l : e.values)
        if (l < 0.0) value -= l;
    if (value < negativity_floor) {
        value = 0.0;
        sigma = ComplexMatrix(s.dim());
    }
    return {value, std::move(sigma)};
}

// ---------------------------------------------------------------------------
// Linear structure of moment space

struct MomentTerm {
    std::size_t i = 0, j = 0, k = 0, l = 0;
    cplx coeff;
};

// sum_t coeff_t chi_{(i,j),(k,l)} = 0 for every moment matrix of the devices.
using MomentRelation = std::vector<MomentTerm>;

namespace detail {

// Real coordinates of Hermitian n x n matrices, orthonormal for the
// Hilbert-Schmidt product: diagonal entries first, then sqrt(2) Re and
// sqrt(2) Im of each upper-triangular entry.
class HermitianCoords {
public:
    explicit HermitianCoords(std::size_t n) : n_(n) {}

    std::size_t n() const noexcept { return n_; }
    std::size_t size() const noexcept { return n_ * n_; }

    std::size_t pair(std::size_t r, std::size_t c) const noexcept {
        return n_ + 2 * (r * n_ - r * (r + 1) / 2 + (c - r - 1));
    }

    Vec to_vec(const ComplexMatrix& m) const {
        Vec v(size());
        for (std::size_t r = 0; r < n_; ++r) v[r] = m(r, r).real();
        for (std::size_t r = 0; r < n_; ++r)
            for (std::size_t c = r + 1; c < n_; ++c) {
                const cplx z = 0.5 * (m(r, c) + std::conj(m(c, r)));
                v[pair(r, c)] = std::sqrt(2.0) * z.real();
                v[pair(r, c) + 1] = std::sqrt(2.0) * z.imag();
            }
        return v;
    }

    ComplexMatrix to_matrix(const Vec& v) const {
        ComplexMatrix m(n_);
        for (std::size_t r = 0; r < n_; ++r) m(r, r) = v[r];
        const double h = 1.0 / std::sqrt(2.0);
        for (std::size_t r = 0; r < n_; ++r)
            for (std::size_t c = r + 1; c < n_; ++c) {
                const cplx z(h * v[pair(r, c)], h * v[pair(r, c) + 1]);
                m(r, c) = z;
                m(c, r) = std::conj(z);
            }
        return m;
    }

    // Coordinates of the real functional chi -> Re(coeff * chi(r, c)).
    void add_real_part(Vec& row, std::size_t r, std::size_t c, cplx coeff) const {
        if (r == c) {
            row[r] += coeff.real();
            return;
        }
        const double h = 1.0 / std::sqrt(2.0);
        if (r < c) {
            row[pair(r, c)] += h * coeff.real();
            row[pair(r, c) + 1] -= h * coeff.imag();
        } else {
            row[pair(c, r)] += h * coeff.real();
            row[pair(c, r) + 1] += h * coeff.imag();
        }
    }

    // The coordinate as a complex-linear combination of entries that is real
    // on Hermitian matrices.
    std::vector<std::pair<std::pair<std::size_t, std::size_t>, cplx>> coordinate_terms(std::size_t idx) const {
        if (idx < n_) return {{{idx, idx}, 1.0}};
        const std::size_t p = (idx - n_) / 2;
        const bool imag = (idx - n_) % 2 == 1;
        std::size_t r = 0, rem = p;
        while (rem >= n_ - r - 1) {
            rem -= n_ - r - 1;
            ++r;
        }
        const std::size_t c = r + 1 + rem;
        const double h = 1.0 / std::sqrt(2.0);
        if (!imag) return {{{r, c}, h}, {{c, r}, h}};
        return {{{r, c}, cplx(0, -h)}, {{c, r}, cplx(0, h)}};
    }

private:
    std::size_t n_;
};

// Real rows Re(R) and Im(R) for each complex relation.
inline std::vector<Vec> relation_rows(const std::vector<MomentRelation>& rels, std::size_t m_a, std::size_t m_b) {
    const std::size_t nb = m_b + 1;
    const HermitianCoords coords(moment_dim(m_a, m_b));
    std::vector<Vec> rows;
    for (const auto& rel : rels) {
        Vec re(coords.size(), 0.0), im(coords.size(), 0.0);
        for (const auto& t : rel) {
            if (t.i > m_a || t.k > m_a || t.j > m_b || t.l > m_b) {
                throw InvalidScenario("relation term index out of range");
            }
            const std::size_t r = t.i * nb + t.j, c = t.k * nb + t.l;
            coords.add_real_part(re, r, c, t.coeff);
            coords.add_real_part(im, r, c, cplx(0, -1) * t.coeff);
        }
        rows.push_back(std::move(re));
        rows.push_back(std::move(im));
    }
    return rows;
}

// Orthonormal basis of the span of all moment matrices of the device.
inline std::vector<Vec> moment_image_basis(const MeasurementSet& m) {
    const std::size_t dim = m.d_a() * m.d_b();
    const HermitianCoords moment_coords(moment_dim(m.m_a(), m.m_b()));
    const HermitianCoords state_coords(dim);
    std::vector<Vec> images;
    for (std::size_t idx = 0; idx < state_coords.size(); ++idx) {
        Vec e(state_coords.size(), 0.0);
        e[idx] = 1.0;
        images.push_back(moment_coords.to_vec(moment_matrix(state_coords.to_matrix(e), m).entries));
    }
    return span_basis(std::move(images), 1e-10);
}

}  // namespace detail

// Linear relations satisfied by every moment matrix of the device, in reduced
// form: one relation per non-pivot real coordinate, expressed through a set of
// pivot coordinates that parametrise the image of the moment map.
inline std::vector<MomentRelation> moment_relations(const MeasurementSet& m) {
    using detail::Vec;
    const std::size_t nb = m.m_b() + 1;
    const detail::HermitianCoords coords(moment_dim(m.m_a(), m.m_b()));
    const auto basis = detail::moment_image_basis(m);
    const std::size_t rank = basis.size(), n_coords = coords.size();

    // rows of the basis matrix, one per coordinate
    std::vector<Vec> coord_rows(n_coords, Vec(rank));
    for (std::size_t c = 0; c < rank; ++c)
        for (std::size_t i = 0; i < n_coords; ++i) coord_rows[i][c] = basis[c][i];

    // pivot coordinates: greedy largest residual among the coordinate rows
    std::vector<std::size_t> pivots;
    {
        std::vector<Vec> residual = coord_rows;
        std::vector<bool> used(n_coords, false);
        std::vector<Vec> q;
        while (pivots.size() < rank) {
            std::size_t best = 0;
            double best_n = -1.0;
            for (std::size_t i = 0; i < n_coords; ++i)
                if (!used[i] && detail::norm(residual[i]) > best_n) {
                    best_n = detail::norm(residual[i]);
                    best = i;
                }
            used[best] = true;
            pivots.push_back(best);
            Vec v = residual[best];
            for (const auto& b : q) detail::axpy(-detail::dot(b, v), b, v);
            const double vn = detail::norm(v);
            for (auto& x : v) x /= vn;
            for (std::size_t i = 0; i < n_coords; ++i)
                if (!used[i]) detail::axpy(-detail::dot(v, residual[i]), v, residual[i]);
            q.push_back(std::move(v));
        }
    }

    std::vector<bool> is_pivot(n_coords, false);
    for (auto p : pivots) is_pivot[p] = true;

    // solve P^T c = row_q where P stacks the pivot rows
    std::vector<MomentRelation> rels;
    std::vector<Vec> pt(rank, Vec(rank));
    for (std::size_t a = 0; a < rank; ++a)
        for (std::size_t b = 0; b < rank; ++b) pt[a][b] = coord_rows[pivots[b]][a];
    const detail::LuSolver lu(pt.empty() ? std::vector<Vec>{} : pt);

    auto add_coordinate = [&](MomentRelation& rel, std::size_t idx, double w) {
        for (const auto& [rc, coeff] : coords.coordinate_terms(idx)) {
            const auto [r, c] = rc;
            rel.push_back({r / nb, r % nb, c / nb, c % nb, w * coeff});
        }
    };
    for (std::size_t qi = 0; qi < n_coords; ++qi) {
        if (is_pivot[qi]) continue;
        MomentRelation rel;
        add_coordinate(rel, qi, 1.0);
        if (rank > 0) {
            const Vec c = lu.solve(coord_rows[qi]);
            for (std::size_t b = 0; b < rank; ++b)
                if (std::abs(c[b]) > 1e-14) add_coordinate(rel, pivots[b], -c[b]);
        }
        rels.push_back(std::move(rel));
    }
    return rels;
}

}  // namespace negdim
