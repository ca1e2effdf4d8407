#pragma once

// Negativity, the modified negativity N_dim = ||rho^{T_A}||_1, their closed
// forms on the axisymmetric family, Schmidt-number witnesses and the
// ceiling-based Schmidt number bound.

#include <algorithm>
#include <cmath>
#include <sstream>

#include "negdim/errors.hpp"
#include "negdim/state_factory.hpp"
#include "negdim/tensor_core.hpp"

namespace negdim {

struct SchmidtClass {
    int k = 1;
    bool certified_lower = true;  // true when k is only guaranteed as a lower bound

    friend bool operator==(const SchmidtClass&, const SchmidtClass&) = default;
};

// Values below this are reported as exactly zero.
inline constexpr double negativity_floor = 1e-12;

inline double negativity(const BipartiteState& s) {
    const double n = 0.5 * (trace_norm(partial_transpose(s)) - 1.0);
    return n < negativity_floor ? 0.0 : n;
}

// 2N + 1, which is the trace norm of the partial transpose.
inline double ndim(const BipartiteState& s) { return 2.0 * negativity(s) + 1.0; }

// Smallest integer >= v, after removing `slack` so round-off cannot push an
// integer value into the next class.
inline int ceil_with_slack(double v, double slack = tol::ceil) {
    return static_cast<int>(std::ceil(v - slack));
}

inline SchmidtClass schmidt_number_lower_bound(const BipartiteState& s) {
    const int cap = static_cast<int>(std::min(s.d_a(), s.d_b()));
    const int k = std::clamp(ceil_with_slack(ndim(s)), 1, cap);
    return {k, true};
}

inline double axi_negativity(const AxiParams& p) {
    axi::check_triangle(p);
    const double d = p.d;
    const double v = 0.5 * (std::sqrt(d * (d - 1.0)) * std::abs(p.x) + std::sqrt(d - 1.0) * p.y -
                            (d - 1.0) / d);
    return std::max(0.0, v);
}

// Entangled points follow the affine law sqrt(d(d-1))|x| + sqrt(d-1) y + 1/d;
// separable points have N_dim = 1.
inline double axi_ndim(const AxiParams& p) {
    axi::check_triangle(p);
    const double d = p.d;
    const double v = std::sqrt(d * (d - 1.0)) * std::abs(p.x) + std::sqrt(d - 1.0) * p.y + 1.0 / d;
    return std::max(1.0, v);
}

// For this family the ceiling is the exact Schmidt number. Integer values sit
// on the border and belong to the smaller (closed) class.
inline SchmidtClass axi_schmidt_class(const AxiParams& p) {
    const int k = std::clamp(ceil_with_slack(axi_ndim(p)), 1, p.d);
    return {k, false};
}

struct Witness {
    int k = 2;
    ComplexMatrix matrix;  // ((k-1)/d) 1 - |Psi_d><Psi_d|

    int d() const noexcept { return static_cast<int>(std::lround(std::sqrt(double(matrix.dim())))); }
};

inline Witness schmidt_witness(int d, int k) {
    if (d < 2) throw InvalidDimension("schmidt_witness: d must be >= 2");
    if (k < 2 || k > d) {
        throw InvalidK("schmidt_witness: k = " + std::to_string(k) + " outside [2, " +
                       std::to_string(d) + "]");
    }
    const auto du = static_cast<std::size_t>(d);
    ComplexMatrix w = ComplexMatrix::identity(du * du) * ((k - 1.0) / d);
    for (std::size_t j = 0; j < du; ++j)
        for (std::size_t l = 0; l < du; ++l) w(j * du + j, l * du + l) -= 1.0 / d;
    return {k, std::move(w)};
}

// tr(W rho). Negative values certify Schmidt number >= k.
inline double witness_value(const Witness& w, const BipartiteState& s) {
    if (w.matrix.dim() != s.dim()) throw DimensionMismatch("witness_value: dimensions differ");
    return hs_inner(w.matrix, s.rho()).real();
}

}  // namespace negdim
