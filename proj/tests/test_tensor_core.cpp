#include "negdim/tensor_core.hpp"

#include <random>

#include <gtest/gtest.h>

#include "negdim/state_factory.hpp"
#include "oracle.hpp"

using namespace negdim;

namespace {

ComplexMatrix random_hermitian(std::size_t n, std::mt19937_64& rng) {
    ComplexMatrix g = ginibre(n, rng);
    return (g + g.adjoint()) * 0.5;
}

ComplexMatrix random_matrix(std::size_t n, std::mt19937_64& rng) { return ginibre(n, rng); }

}  // namespace

TEST(HermitianEig, Identity) {
    const auto e = hermitian_eig(ComplexMatrix::identity(3));
    ASSERT_EQ(e.values.size(), 3u);
    for (double l : e.values) EXPECT_DOUBLE_EQ(l, 1.0);
}

TEST(HermitianEig, PauliX) {
    const auto e = hermitian_eig(ComplexMatrix{{0.0, 1.0}, {1.0, 0.0}});
    EXPECT_NEAR(e.values[0], -1.0, 1e-15);
    EXPECT_NEAR(e.values[1], 1.0, 1e-15);
}

TEST(HermitianEig, ComplexOffDiagonal) {
    // Pauli Y
    const auto e = hermitian_eig(ComplexMatrix{{0.0, cplx(0, -1)}, {cplx(0, 1), 0.0}});
    EXPECT_NEAR(e.values[0], -1.0, 1e-15);
    EXPECT_NEAR(e.values[1], 1.0, 1e-15);
}

TEST(HermitianEig, RandomReconstruction) {
    std::mt19937_64 rng(11);
    for (std::size_t n : {1u, 2u, 6u, 17u, 25u}) {
        for (int trial = 0; trial < 5; ++trial) {
            const ComplexMatrix h = random_hermitian(n, rng);
            const auto e = hermitian_eig(h);
            const ComplexMatrix rebuilt = spectral_map(e, [](double l) { return l; });
            EXPECT_LE(max_abs_diff(rebuilt, h), 1e-9 * double(n) * h.max_abs());

            const ComplexMatrix gram = e.vectors.adjoint() * e.vectors;
            EXPECT_LE(max_abs_diff(gram, ComplexMatrix::identity(n)), 1e-9);
            EXPECT_TRUE(std::is_sorted(e.values.begin(), e.values.end()));
            EXPECT_LE(oracle::max_spectrum_diff(e.values, oracle::spectrum(h)), 1e-10);

            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t r = 0; r < n; ++r) {
                    cplx hv = 0.0;
                    for (std::size_t c = 0; c < n; ++c) hv += h(r, c) * e.vectors(c, i);
                    EXPECT_LE(std::abs(hv - e.values[i] * e.vectors(r, i)), 1e-9 * double(n) * h.max_abs());
                }
            }
        }
    }
}

TEST(HermitianEig, DegenerateSpectrum) {
    // Projector of rank 3 in dimension 7: eigenvalues {0 x4, 1 x3}.
    std::mt19937_64 rng(3);
    const ComplexMatrix u = haar_unitary(7, rng);
    const ComplexMatrix p = u * ComplexMatrix::diagonal({1, 1, 1, 0, 0, 0, 0}) * u.adjoint();
    const auto e = hermitian_eig((p + p.adjoint()) * 0.5);
    EXPECT_LE(oracle::max_spectrum_diff(e.values, {0, 0, 0, 0, 1, 1, 1}), 1e-12);
}

TEST(HermitianEig, RejectsNonHermitian) {
    EXPECT_THROW(hermitian_eig(ComplexMatrix{{0.0, 1.0}, {0.0, 0.0}}), NotHermitian);
}

TEST(HermitianEig, ZeroMatrix) {
    const auto e = hermitian_eig(ComplexMatrix(4));
    for (double l : e.values) EXPECT_EQ(l, 0.0);
}

TEST(TraceNorm, Diagonal) { EXPECT_NEAR(trace_norm(ComplexMatrix::diagonal({1.0, -0.5})), 1.5, 1e-15); }

TEST(TraceNorm, DensityMatrixIsOne) {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 10; ++i) {
        const auto s = random_density_matrix(3, 2, rng);
        EXPECT_NEAR(trace_norm(s.rho()), 1.0, 1e-12);
    }
}

TEST(TraceNorm, BellPartialTransposeIsTwo) {
    EXPECT_NEAR(trace_norm(partial_transpose(max_entangled(2))), 2.0, 1e-14);
}

TEST(TraceNorm, NonHermitianMatchesSvd) {
    std::mt19937_64 rng(8);
    for (std::size_t n : {2u, 5u, 9u}) {
        const ComplexMatrix m = random_matrix(n, rng);
        EXPECT_NEAR(trace_norm(m), oracle::trace_norm(m), 1e-9);
    }
}

TEST(PartialTranspose, ProductStateSpectrumUnchanged) {
    std::mt19937_64 rng(21);
    const auto s = random_product_state(3, 2, rng);
    const auto pt = partial_transpose(s);
    EXPECT_LE(oracle::max_spectrum_diff(hermitian_eigenvalues(pt), oracle::spectrum(s.rho())), 1e-12);
}

TEST(PartialTranspose, BellSpectrum) {
    const auto pt = partial_transpose(max_entangled(2));
    EXPECT_LE(oracle::max_spectrum_diff(hermitian_eigenvalues(pt), {-0.5, 0.5, 0.5, 0.5}), 1e-14);
    EXPECT_LE(oracle::max_spectrum_diff(oracle::spectrum(pt), {-0.5, 0.5, 0.5, 0.5}), 1e-14);
}

TEST(PartialTranspose, InvolutionAndTrace) {
    std::mt19937_64 rng(2);
    for (auto [da, db] : {std::pair<std::size_t, std::size_t>{2, 3}, {3, 3}, {4, 2}}) {
        const auto s = random_density_matrix(da, db, rng);
        const auto pt = partial_transpose(s);
        EXPECT_EQ(partial_transpose(pt, da, db), s.rho());
        EXPECT_EQ(pt.trace(), s.rho().trace());
        EXPECT_TRUE(pt.is_hermitian(0.0));
        EXPECT_EQ(pt, oracle::partial_transpose(s.rho(), da, db));
        EXPECT_GE(trace_norm(pt), 1.0 - 1e-12);
    }
}

TEST(PartialTranspose, DimensionMismatch) {
    EXPECT_THROW(partial_transpose(ComplexMatrix::identity(6), 4, 2), DimensionMismatch);
}

TEST(PartialTrace, OfProductState) {
    std::mt19937_64 rng(4);
    const auto a = random_density_matrix(2, 1, rng);
    const auto b = random_density_matrix(3, 1, rng);
    const ComplexMatrix ab = kron(a.rho(), b.rho());
    EXPECT_LE(max_abs_diff(partial_trace(ab, 2, 3, Party::B), a.rho()), 1e-15);
    EXPECT_LE(max_abs_diff(partial_trace(ab, 2, 3, Party::A), b.rho()), 1e-15);
}

TEST(Kron, Identities) {
    EXPECT_EQ(kron(ComplexMatrix::identity(2), ComplexMatrix::identity(3)), ComplexMatrix::identity(6));
    EXPECT_EQ(kron(ComplexMatrix::diagonal({1, 2}), ComplexMatrix::diagonal({3, 4})),
              ComplexMatrix::diagonal({3, 4, 6, 8}));
}

TEST(Kron, TraceFactorises) {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 5; ++i) {
        const auto a = random_matrix(3, rng), b = random_matrix(3, rng);
        EXPECT_LE(std::abs(kron(a, b).trace() - a.trace() * b.trace()), 1e-12);
        const auto k = kron(a, b);
        EXPECT_EQ(k(1 * 3 + 2, 0 * 3 + 1), a(1, 0) * b(2, 1));
    }
}

TEST(HsInner, Basics) {
    EXPECT_EQ(hs_inner(ComplexMatrix::identity(4), ComplexMatrix::identity(4)), cplx(4.0));
    const auto bell = max_entangled(3);
    EXPECT_NEAR(hs_inner(bell.rho(), bell.rho()).real(), 1.0, 1e-15);
    EXPECT_THROW(hs_inner(ComplexMatrix(2), ComplexMatrix(3)), DimensionMismatch);
}

TEST(HsInner, DirectSumAndConjugateSymmetry) {
    std::mt19937_64 rng(9);
    for (int i = 0; i < 5; ++i) {
        const auto a = random_matrix(4, rng), b = random_matrix(4, rng);
        cplx direct = 0.0;
        for (std::size_t r = 0; r < 4; ++r)
            for (std::size_t c = 0; c < 4; ++c) direct += std::conj(a(r, c)) * b(r, c);
        EXPECT_LE(std::abs(hs_inner(a, b) - direct), 1e-13);
        EXPECT_LE(std::abs(hs_inner(a, b) - std::conj(hs_inner(b, a))), 1e-13);
        const cplx aa = hs_inner(a, a);
        EXPECT_EQ(aa.imag(), 0.0);
        EXPECT_GE(aa.real(), 0.0);
    }
}

TEST(BipartiteState, Validation) {
    EXPECT_THROW(BipartiteState(ComplexMatrix::identity(4) * 0.25, 2, 3), DimensionMismatch);
    EXPECT_THROW(BipartiteState(ComplexMatrix::identity(4) * 0.3, 2, 2), InvalidState);
    EXPECT_THROW(BipartiteState(ComplexMatrix::diagonal({1.5, -0.5, 0, 0}), 2, 2), InvalidState);
    ComplexMatrix nonherm = ComplexMatrix::identity(4) * 0.25;
    nonherm(0, 1) = 1e-6;
    EXPECT_THROW(BipartiteState(nonherm, 2, 2), InvalidState);
    EXPECT_NO_THROW(BipartiteState(ComplexMatrix::identity(6) * (1.0 / 6.0), 2, 3));
}
