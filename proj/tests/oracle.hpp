#pragma once

// Test-only reference computations backed by Eigen. Nothing here touches the
// library's Jacobi solver, so values from these helpers serve as an
// independent check of it.

#include <Eigen/Dense>

#include <algorithm>
#include <vector>

#include "negdim/tensor_core.hpp"

namespace oracle {

inline Eigen::MatrixXcd to_eigen(const negdim::ComplexMatrix& m) {
    const auto n = static_cast<Eigen::Index>(m.dim());
    Eigen::MatrixXcd out(n, n);
    for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index c = 0; c < n; ++c) out(r, c) = m(r, c);
    return out;
}

inline std::vector<double> spectrum(const negdim::ComplexMatrix& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(to_eigen(m), Eigen::EigenvaluesOnly);
    std::vector<double> v(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    std::sort(v.begin(), v.end());
    return v;
}

inline double min_eigenvalue(const negdim::ComplexMatrix& m) { return spectrum(m).front(); }

// ||M||_1 via singular values.
inline double trace_norm(const negdim::ComplexMatrix& m) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(to_eigen(m));
    return svd.singularValues().sum();
}

// Independent partial transpose: swap the A-indices via explicit tensor
// reshaping rather than the library's index formula.
inline negdim::ComplexMatrix partial_transpose(const negdim::ComplexMatrix& m, std::size_t da,
                                               std::size_t db) {
    negdim::ComplexMatrix out(m.dim());
    for (std::size_t row = 0; row < m.dim(); ++row)
        for (std::size_t col = 0; col < m.dim(); ++col) {
            const std::size_t a1 = row / db, b1 = row % db, a2 = col / db, b2 = col % db;
            out(a2 * db + b1, a1 * db + b2) = m(row, col);
        }
    return out;
}

inline double negativity(const negdim::ComplexMatrix& rho, std::size_t da, std::size_t db) {
    double neg = 0.0;
    for (double l : oracle::spectrum(oracle::partial_transpose(rho, da, db)))
        if (l < 0.0) neg -= l;
    return neg;
}

// tr[rho (A_k^dagger A_i (x) B_l^dagger B_j)] with explicit Kronecker
// products, row (i, j), column (k, l).
inline negdim::ComplexMatrix moment_matrix(const negdim::ComplexMatrix& rho,
                                           const std::vector<negdim::ComplexMatrix>& a,
                                           const std::vector<negdim::ComplexMatrix>& b) {
    const Eigen::MatrixXcd r = to_eigen(rho);
    const std::size_t na = a.size(), nb = b.size();
    negdim::ComplexMatrix out(na * nb);
    for (std::size_t i = 0; i < na; ++i)
        for (std::size_t j = 0; j < nb; ++j)
            for (std::size_t k = 0; k < na; ++k)
                for (std::size_t l = 0; l < nb; ++l) {
                    const Eigen::MatrixXcd x = to_eigen(a[k]).adjoint() * to_eigen(a[i]);
                    const Eigen::MatrixXcd y = to_eigen(b[l]).adjoint() * to_eigen(b[j]);
                    Eigen::MatrixXcd op(x.rows() * y.rows(), x.cols() * y.cols());
                    for (Eigen::Index p = 0; p < x.rows(); ++p)
                        for (Eigen::Index q = 0; q < x.cols(); ++q)
                            op.block(p * y.rows(), q * y.cols(), y.rows(), y.cols()) = x(p, q) * y;
                    out(i * nb + j, k * nb + l) = (r * op).trace();
                }
    return out;
}

inline double max_spectrum_diff(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace oracle
