#pragma once

// Constructors for the states used throughout the library: the maximally
// entangled state, the two-parameter axisymmetric family and its symmetry
// group, pure states from Schmidt coefficients, and seeded random states.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "negdim/errors.hpp"
#include "negdim/tensor_core.hpp"

namespace negdim {

// ---------------------------------------------------------------------------
// Axisymmetric chart

// Coordinates (x, y) of an axisymmetric two-qudit state. The chart is scaled
// so that Euclidean distance in (x, y) equals Hilbert-Schmidt distance.
struct AxiParams {
    int d = 2;
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const AxiParams&, const AxiParams&) = default;
};

namespace axi {

inline constexpr double boundary_slack = 1e-12;

// a = alpha * y (diagonal asymmetry), b = beta * x (coherence |jj><kk|).
inline double alpha(int d) { return std::sqrt(d - 1.0) / d; }
inline double beta(int d) { return 1.0 / std::sqrt(d * (d - 1.0)); }

inline double x_min(int d) { return -1.0 / std::sqrt(d * (d - 1.0)); }
inline double x_max(int d) { return std::sqrt((d - 1.0) / d); }
inline double y_min(int d) { return -1.0 / (d * std::sqrt(d - 1.0)); }
inline double y_max(int d) { return std::sqrt(d - 1.0) / d; }

inline double a_of(const AxiParams& p) { return alpha(p.d) * p.y; }
inline double b_of(const AxiParams& p) { return beta(p.d) * p.x; }

inline AxiParams maximally_entangled_corner(int d) { return {d, x_max(d), y_max(d)}; }

// Empty string when p lies in the closed triangle, otherwise a description of
// the first violated bound.
inline std::string triangle_violation(const AxiParams& p, double slack = boundary_slack) {
    std::ostringstream msg;
    msg.precision(17);
    if (p.d < 2) {
        msg << "d = " << p.d << " < 2";
        return msg.str();
    }
    const int d = p.d;
    const double dd = static_cast<double>(d);
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) return "non-finite coordinate";
    if (p.y < y_min(d) - slack || p.y > y_max(d) + slack) {
        msg << "y = " << p.y << " outside [" << y_min(d) << ", " << y_max(d) << "]";
        return msg.str();
    }
    if (p.x < x_min(d) - slack || p.x > x_max(d) + slack) {
        msg << "x = " << p.x << " outside [" << x_min(d) << ", " << x_max(d) << "]";
        return msg.str();
    }
    const double a = a_of(p), b = b_of(p);
    if (a < -1.0 / (dd * dd) - slack || a > (dd - 1.0) / (dd * dd) + slack) {
        msg << "a = " << a << " outside [-1/d^2, (d-1)/d^2]";
        return msg.str();
    }
    const double upper = 1.0 / (dd * dd) + a;
    const double lower = -upper / (dd - 1.0);
    if (b < lower - slack || b > upper + slack) {
        msg << "b = " << b << " outside [" << lower << ", " << upper << "]";
        return msg.str();
    }
    return {};
}

inline bool in_triangle(const AxiParams& p, double slack = boundary_slack) {
    return triangle_violation(p, slack).empty();
}

inline void check_triangle(const AxiParams& p) {
    if (p.d < 2) throw InvalidDimension("axisymmetric state needs d >= 2, got " + std::to_string(p.d));
    if (auto why = triangle_violation(p); !why.empty()) throw OutOfTriangle(why);
}

}  // namespace axi

// ---------------------------------------------------------------------------

inline std::vector<cplx> max_entangled_vector(std::size_t d) {
    if (d < 2) throw InvalidDimension("max_entangled: d must be >= 2");
    std::vector<cplx> psi(d * d);
    const double amp = 1.0 / std::sqrt(static_cast<double>(d));
    for (std::size_t j = 0; j < d; ++j) psi[j * d + j] = amp;
    return psi;
}

// |Psi_d> = (1/sqrt d) sum_j |jj>. Entries are set exactly to 1/d.
inline BipartiteState max_entangled(std::size_t d) {
    if (d < 2) throw InvalidDimension("max_entangled: d must be >= 2");
    ComplexMatrix rho(d * d);
    for (std::size_t j = 0; j < d; ++j)
        for (std::size_t k = 0; k < d; ++k) rho(j * d + j, k * d + k) = 1.0 / static_cast<double>(d);
    return BipartiteState(std::move(rho), d, d);
}

inline BipartiteState maximally_mixed(std::size_t d_a, std::size_t d_b) {
    const std::size_t n = d_a * d_b;
    return BipartiteState(ComplexMatrix::identity(n) * (1.0 / static_cast<double>(n)), d_a, d_b);
}

inline BipartiteState axi_state(const AxiParams& p) {
    axi::check_triangle(p);
    const auto d = static_cast<std::size_t>(p.d);
    const double dd = static_cast<double>(p.d);
    const double a = axi::a_of(p), b = axi::b_of(p);
    const double same = 1.0 / (dd * dd) + a;
    const double diff = 1.0 / (dd * dd) - a / (dd - 1.0);
    ComplexMatrix rho(d * d);
    for (std::size_t j = 0; j < d; ++j)
        for (std::size_t k = 0; k < d; ++k) {
            if (j == k) {
                rho(j * d + j, j * d + j) = same;
            } else {
                rho(j * d + k, j * d + k) = diff;
                rho(j * d + j, k * d + k) = b;
            }
        }
    return BipartiteState(std::move(rho), d, d);
}

// Projection onto the axisymmetric family: the group average over qudit
// exchange, simultaneous basis permutations and coupled phase rotations.
// Only <jk|.|jk> and <jj|.|kk> survive the phase average; the permutations
// then average each class to a single number.
inline BipartiteState axi_twirl(const BipartiteState& s) {
    if (s.d_a() != s.d_b()) throw DimensionMismatch("axi_twirl: requires d_a == d_b");
    const std::size_t d = s.d_a();
    const auto& r = s.rho();
    if (d == 1) return s;
    double same = 0.0, diff = 0.0;
    cplx coh = 0.0;
    for (std::size_t j = 0; j < d; ++j)
        for (std::size_t k = 0; k < d; ++k) {
            if (j == k) {
                same += r(j * d + j, j * d + j).real();
            } else {
                diff += r(j * d + k, j * d + k).real();
                coh += r(j * d + j, k * d + k);
            }
        }
    const double pairs = static_cast<double>(d * (d - 1));
    same /= static_cast<double>(d);
    diff /= pairs;
    const double b = coh.real() / pairs;
    ComplexMatrix out(d * d);
    for (std::size_t j = 0; j < d; ++j)
        for (std::size_t k = 0; k < d; ++k) {
            if (j == k) {
                out(j * d + j, j * d + j) = same;
            } else {
                out(j * d + k, j * d + k) = diff;
                out(j * d + j, k * d + k) = b;
            }
        }
    return BipartiteState(std::move(out), d, d);
}

inline AxiParams axi_coords(const BipartiteState& s) {
    if (s.d_a() != s.d_b() || s.d_a() < 2) {
        throw NotAxisymmetric("axi_coords: needs two qudits of equal dimension >= 2");
    }
    const BipartiteState tw = axi_twirl(s);
    if (const double dev = max_abs_diff(tw.rho(), s.rho()); dev > 1e-10) {
        std::ostringstream msg;
        msg << "axi_coords: state is not axisymmetric (max|twirl(rho) - rho| = " << dev << ")";
        throw NotAxisymmetric(msg.str());
    }
    const int d = static_cast<int>(s.d_a());
    const std::size_t du = s.d_a();
    const double dd = static_cast<double>(d);
    const double a = tw.rho()(0, 0).real() - 1.0 / (dd * dd);
    const double b = tw.rho()(0, du + 1).real();  // <00|rho|11>
    AxiParams p{d, b / axi::beta(d), a / axi::alpha(d)};
    axi::check_triangle(p);
    return p;
}

// Diagonals of the generalised Gell-Mann Cartan generators, tr(g_j g_k) = 2 delta_jk.
inline std::vector<std::vector<double>> su_diagonal_generators(std::size_t d) {
    if (d < 2) throw InvalidDimension("su_diagonal_generators: d must be >= 2");
    std::vector<std::vector<double>> gens;
    for (std::size_t l = 1; l < d; ++l) {
        const double ld = static_cast<double>(l);
        const double norm = std::sqrt(2.0 / (ld * (ld + 1.0)));
        std::vector<double> g(d, 0.0);
        for (std::size_t j = 0; j < l; ++j) g[j] = norm;
        g[l] = -ld * norm;
        gens.push_back(std::move(g));
    }
    return gens;
}

// exp(i sum_j phi_j g_j) (x) exp(-i sum_k phi_k g_k)
inline ComplexMatrix coupled_phase_rotation(std::size_t d, std::span<const double> angles) {
    if (d < 2) throw InvalidDimension("coupled_phase_rotation: d must be >= 2");
    if (angles.size() != d - 1) {
        throw InvalidDimension("coupled_phase_rotation: expected " + std::to_string(d - 1) +
                               " angles, got " + std::to_string(angles.size()));
    }
    const auto gens = su_diagonal_generators(d);
    std::vector<double> theta(d, 0.0);
    for (std::size_t l = 0; l + 1 < d; ++l)
        for (std::size_t j = 0; j < d; ++j) theta[j] += angles[l] * gens[l][j];
    ComplexMatrix u(d * d);
    for (std::size_t j = 0; j < d; ++j)
        for (std::size_t k = 0; k < d; ++k) u(j * d + k, j * d + k) = std::polar(1.0, theta[j] - theta[k]);
    return u;
}

// Unitary |jk> -> |kj>.
inline ComplexMatrix qudit_swap(std::size_t d) {
    ComplexMatrix u(d * d);
    for (std::size_t j = 0; j < d; ++j)
        for (std::size_t k = 0; k < d; ++k) u(k * d + j, j * d + k) = 1.0;
    return u;
}

// P (x) P with P|j> = |perm[j]>.
inline ComplexMatrix basis_permutation(std::span<const std::size_t> perm) {
    const std::size_t d = perm.size();
    std::vector<bool> seen(d, false);
    for (auto p : perm) {
        if (p >= d || seen[p]) throw InvalidDimension("basis_permutation: not a permutation");
        seen[p] = true;
    }
    ComplexMatrix u(d * d);
    for (std::size_t j = 0; j < d; ++j)
        for (std::size_t k = 0; k < d; ++k) u(perm[j] * d + perm[k], j * d + k) = 1.0;
    return u;
}

// U rho U^dagger
inline ComplexMatrix conjugate_by(const ComplexMatrix& u, const ComplexMatrix& rho) {
    return u * rho * u.adjoint();
}

// ---------------------------------------------------------------------------
// Pure and random states

class SchmidtVector {
public:
    explicit SchmidtVector(std::vector<double> coefficients) : c_(std::move(coefficients)) {
        if (c_.empty()) throw InvalidK("SchmidtVector: no coefficients");
        double norm2 = 0.0;
        for (double v : c_) {
            if (!(v > 0.0)) throw InvalidState("SchmidtVector: coefficients must be positive");
            norm2 += v * v;
        }
        if (std::abs(norm2 - 1.0) > 1e-12) {
            std::ostringstream msg;
            msg << "SchmidtVector: sum of squares = " << norm2 << ", expected 1";
            throw InvalidState(msg.str());
        }
    }

    static SchmidtVector uniform(std::size_t k) {
        if (k == 0) throw InvalidK("SchmidtVector::uniform: k must be >= 1");
        return SchmidtVector(std::vector<double>(k, 1.0 / std::sqrt(static_cast<double>(k))));
    }

    std::size_t rank() const noexcept { return c_.size(); }
    std::span<const double> coefficients() const noexcept { return c_; }

private:
    std::vector<double> c_;
};

inline std::vector<cplx> schmidt_vector_state(const SchmidtVector& sv, std::size_t d_a, std::size_t d_b) {
    if (sv.rank() > std::min(d_a, d_b)) {
        throw RankTooLarge("Schmidt rank " + std::to_string(sv.rank()) + " exceeds min(d_a, d_b) = " +
                           std::to_string(std::min(d_a, d_b)));
    }
    std::vector<cplx> psi(d_a * d_b);
    for (std::size_t i = 0; i < sv.rank(); ++i) psi[i * d_b + i] = sv.coefficients()[i];
    return psi;
}

// sum_i c_i |ii> embedded in C^{d_a} (x) C^{d_b}
inline BipartiteState pure_state_from_schmidt(const SchmidtVector& sv, std::size_t d_a, std::size_t d_b) {
    const auto psi = schmidt_vector_state(sv, d_a, d_b);
    return BipartiteState(ComplexMatrix::outer(psi), d_a, d_b);
}

inline ComplexMatrix ginibre(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    ComplexMatrix g(n);
    for (auto& z : g.entries()) {
        const double re = normal(rng);
        const double im = normal(rng);
        z = {re, im};
    }
    return g;
}

// Haar-distributed unitary from Gram-Schmidt on the columns of a Ginibre
// matrix (QR with positive diagonal R).
inline ComplexMatrix haar_unitary(std::size_t n, std::mt19937_64& rng) {
    ComplexMatrix q = ginibre(n, rng);
    for (std::size_t c = 0; c < n; ++c) {
        for (int pass = 0; pass < 2; ++pass) {
            for (std::size_t p = 0; p < c; ++p) {
                cplx dot = 0.0;
                for (std::size_t r = 0; r < n; ++r) dot += std::conj(q(r, p)) * q(r, c);
                for (std::size_t r = 0; r < n; ++r) q(r, c) -= dot * q(r, p);
            }
        }
        double norm = 0.0;
        for (std::size_t r = 0; r < n; ++r) norm += std::norm(q(r, c));
        norm = std::sqrt(norm);
        for (std::size_t r = 0; r < n; ++r) q(r, c) /= norm;
    }
    return q;
}

inline std::vector<cplx> matvec(const ComplexMatrix& m, std::span<const cplx> v) {
    std::vector<cplx> out(m.dim());
    for (std::size_t r = 0; r < m.dim(); ++r)
        for (std::size_t c = 0; c < m.dim(); ++c) out[r] += m(r, c) * v[c];
    return out;
}

// Mixed state with Ginibre-induced spectrum, rank <= `rank`.
inline BipartiteState random_density_matrix(std::size_t d_a, std::size_t d_b, std::mt19937_64& rng,
                                            std::size_t rank = 0) {
    const std::size_t n = d_a * d_b;
    if (rank == 0 || rank > n) rank = n;
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<cplx> g(n * rank);
    for (auto& z : g) {
        const double re = normal(rng);
        const double im = normal(rng);
        z = {re, im};
    }
    ComplexMatrix rho(n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) {
            cplx s = 0.0;
            for (std::size_t k = 0; k < rank; ++k) s += g[r * rank + k] * std::conj(g[c * rank + k]);
            rho(r, c) = s;
        }
    rho *= 1.0 / rho.trace().real();
    return BipartiteState(std::move(rho), d_a, d_b);
}

inline BipartiteState random_product_state(std::size_t d_a, std::size_t d_b, std::mt19937_64& rng) {
    const auto ra = random_density_matrix(d_a, 1, rng);
    const auto rb = random_density_matrix(d_b, 1, rng);
    ComplexMatrix rho = kron(ra.rho(), rb.rho());
    rho *= 1.0 / rho.trace().real();
    return BipartiteState(std::move(rho), d_a, d_b);
}

// Random pure state of Schmidt rank exactly `rank`, locally rotated by Haar
// unitaries on both sides.
inline std::vector<cplx> random_schmidt_rank_vector(std::size_t d_a, std::size_t d_b, std::size_t rank,
                                                    std::mt19937_64& rng) {
    if (rank == 0) throw InvalidK("random_schmidt_rank_vector: rank must be >= 1");
    if (rank > std::min(d_a, d_b)) throw RankTooLarge("random_schmidt_rank_vector: rank too large");
    std::exponential_distribution<double> expo(1.0);
    std::vector<double> w(rank);
    for (auto& v : w) v = expo(rng) + 1e-12;
    const double total = std::accumulate(w.begin(), w.end(), 0.0);
    const ComplexMatrix ua = haar_unitary(d_a, rng);
    const ComplexMatrix ub = haar_unitary(d_b, rng);
    std::vector<cplx> psi(d_a * d_b);
    for (std::size_t i = 0; i < rank; ++i) {
        const double c = std::sqrt(w[i] / total);
        for (std::size_t a = 0; a < d_a; ++a)
            for (std::size_t b = 0; b < d_b; ++b) psi[a * d_b + b] += c * ua(a, i) * ub(b, i);
    }
    return psi;
}

// Convex mixture of `n_terms` locally rotated pure states, each of Schmidt
// rank drawn uniformly from 1..k. Deterministic for a given seed.
inline BipartiteState random_schmidt_rank_k_mixture(std::size_t d, std::size_t k, std::size_t n_terms,
                                                    std::uint64_t seed) {
    if (d < 2) throw InvalidDimension("random_schmidt_rank_k_mixture: d must be >= 2");
    if (k == 0) throw InvalidK("random_schmidt_rank_k_mixture: k must be >= 1");
    if (k > d) throw RankTooLarge("random_schmidt_rank_k_mixture: k > d");
    if (n_terms == 0) throw InvalidDimension("random_schmidt_rank_k_mixture: n_terms must be >= 1");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick_rank(1, k);
    std::exponential_distribution<double> expo(1.0);
    std::vector<double> weights(n_terms);
    for (auto& w : weights) w = expo(rng) + 1e-12;
    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);

    ComplexMatrix rho(d * d);
    for (std::size_t t = 0; t < n_terms; ++t) {
        const auto psi = random_schmidt_rank_vector(d, d, pick_rank(rng), rng);
        rho += ComplexMatrix::outer(psi) * (weights[t] / total);
    }
    rho *= 1.0 / rho.trace().real();
    return BipartiteState(std::move(rho), d, d);
}

}  // namespace negdim
