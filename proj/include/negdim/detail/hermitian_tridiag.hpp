#pragma once

// Hermitian eigendecomposition by Householder reduction to a real symmetric
// tridiagonal matrix followed by implicit QL iterations, in split real
// arithmetic. Used on the hot path of the moment-space solver (many PSD
// projections of small matrices).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <vector>

#include "negdim/errors.hpp"
#include "negdim/tensor_core.hpp"

namespace negdim::detail {

// Real and imaginary parts of a dense n x n matrix, row-major.
struct SplitMatrix {
    std::size_t n = 0;
    std::vector<double> re, im;

    explicit SplitMatrix(std::size_t dim) : n(dim), re(dim * dim, 0.0), im(dim * dim, 0.0) {}
};

struct SplitEigen {
    std::vector<double> values;  // ascending
    SplitMatrix vectors;         // column c belongs to values[c]
};

inline SplitEigen hermitian_eig_split(const SplitMatrix& m) {
    const std::size_t n = m.n;
    // Hermitian part
    SplitMatrix a(n);
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c) {
            a.re[r * n + c] = 0.5 * (m.re[r * n + c] + m.re[c * n + r]);
            a.im[r * n + c] = 0.5 * (m.im[r * n + c] - m.im[c * n + r]);
        }
    SplitMatrix q(n);
    for (std::size_t i = 0; i < n; ++i) q.re[i * n + i] = 1.0;

    std::vector<double> vr(n), vi(n), pr(n), pi(n);
    for (std::size_t k = 0; k + 2 < n; ++k) {
        double sigma2 = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) sigma2 += a.re[i * n + k] * a.re[i * n + k] + a.im[i * n + k] * a.im[i * n + k];
        const double xr = a.re[(k + 1) * n + k], xi = a.im[(k + 1) * n + k];
        const double x0 = std::sqrt(xr * xr + xi * xi);
        if (sigma2 - x0 * x0 <= 0.0) continue;  // already tridiagonal in this column
        const double sigma = std::sqrt(sigma2);
        const double phr = x0 > 0.0 ? xr / x0 : 1.0, phi = x0 > 0.0 ? xi / x0 : 0.0;
        for (std::size_t i = k + 1; i < n; ++i) {
            vr[i] = a.re[i * n + k];
            vi[i] = a.im[i * n + k];
        }
        vr[k + 1] += phr * sigma;
        vi[k + 1] += phi * sigma;
        double vn2 = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) vn2 += vr[i] * vr[i] + vi[i] * vi[i];
        const double beta = 2.0 / vn2;

        // H A H = A - v w^dagger - w v^dagger on the trailing block, with
        // p = beta A v and w = p - (beta/2)(v^dagger p) v
        for (std::size_t r = k + 1; r < n; ++r) {
            double sr = 0.0, si = 0.0;
            for (std::size_t c = k + 1; c < n; ++c) {
                const double ar = a.re[r * n + c], ai = a.im[r * n + c];
                sr += ar * vr[c] - ai * vi[c];
                si += ar * vi[c] + ai * vr[c];
            }
            pr[r] = beta * sr;
            pi[r] = beta * si;
        }
        double kr = 0.0, ki = 0.0;  // v^dagger p
        for (std::size_t i = k + 1; i < n; ++i) {
            kr += vr[i] * pr[i] + vi[i] * pi[i];
            ki += vr[i] * pi[i] - vi[i] * pr[i];
        }
        kr *= 0.5 * beta;
        ki *= 0.5 * beta;
        for (std::size_t i = k + 1; i < n; ++i) {
            const double wr = pr[i] - (kr * vr[i] - ki * vi[i]);
            const double wi = pi[i] - (kr * vi[i] + ki * vr[i]);
            pr[i] = wr;
            pi[i] = wi;
        }
        for (std::size_t r = k + 1; r < n; ++r)
            for (std::size_t c = k + 1; c < n; ++c) {
                // v_r conj(w_c) + w_r conj(v_c)
                a.re[r * n + c] -= vr[r] * pr[c] + vi[r] * pi[c] + pr[r] * vr[c] + pi[r] * vi[c];
                a.im[r * n + c] -= vi[r] * pr[c] - vr[r] * pi[c] + pi[r] * vr[c] - pr[r] * vi[c];
            }
        a.re[(k + 1) * n + k] = -phr * sigma;
        a.im[(k + 1) * n + k] = -phi * sigma;
        a.re[k * n + k + 1] = -phr * sigma;
        a.im[k * n + k + 1] = phi * sigma;
        for (std::size_t i = k + 2; i < n; ++i) {
            a.re[i * n + k] = a.im[i * n + k] = 0.0;
            a.re[k * n + i] = a.im[k * n + i] = 0.0;
        }
        // Q <- Q H
        for (std::size_t r = 0; r < n; ++r) {
            double sr = 0.0, si = 0.0;
            for (std::size_t i = k + 1; i < n; ++i) {
                const double qr = q.re[r * n + i], qi = q.im[r * n + i];
                sr += qr * vr[i] - qi * vi[i];
                si += qr * vi[i] + qi * vr[i];
            }
            sr *= beta;
            si *= beta;
            for (std::size_t i = k + 1; i < n; ++i) {
                q.re[r * n + i] -= sr * vr[i] + si * vi[i];
                q.im[r * n + i] -= si * vr[i] - sr * vi[i];
            }
        }
    }

    // phases turning the off-diagonal real and nonnegative
    std::vector<double> d(n), e(n, 0.0);
    double fr = 1.0, fi = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        d[k] = a.re[k * n + k];
        if (k == 0) continue;
        const double sr = a.re[k * n + k - 1], si = a.im[k * n + k - 1];
        const double b = std::sqrt(sr * sr + si * si);
        e[k - 1] = b;
        if (b > 0.0) {
            const double nr = fr * sr / b - fi * si / b, ni = fr * si / b + fi * sr / b;
            fr = nr;
            fi = ni;
        }
        for (std::size_t r = 0; r < n; ++r) {
            const double qr = q.re[r * n + k], qi = q.im[r * n + k];
            q.re[r * n + k] = qr * fr - qi * fi;
            q.im[r * n + k] = qr * fi + qi * fr;
        }
    }

    // implicit QL on the real tridiagonal matrix; zt holds Z transposed so
    // each rotation touches two contiguous rows
    std::vector<double> zt(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) zt[i * n + i] = 1.0;
    const double eps = std::numeric_limits<double>::epsilon();
    for (std::size_t l = 0; l < n; ++l) {
        int iter = 0;
        std::size_t mm;
        do {
            for (mm = l; mm + 1 < n; ++mm) {
                const double dd = std::abs(d[mm]) + std::abs(d[mm + 1]);
                if (std::abs(e[mm]) <= eps * dd) break;
            }
            if (mm == l) break;
            if (++iter > 60) throw NoConvergence("hermitian_eig_tridiagonal: QL iteration did not converge");
            double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            double r = std::sqrt(g * g + 1.0);
            g = d[mm] - d[l] + e[l] / (g + std::copysign(r, g));
            double s = 1.0, c = 1.0, p = 0.0;
            bool underflow = false;
            for (std::size_t i = mm; i-- > l;) {
                double f = s * e[i];
                const double b = c * e[i];
                r = std::sqrt(f * f + g * g);
                e[i + 1] = r;
                if (r == 0.0) {
                    d[i + 1] -= p;
                    e[mm] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                double* zi = &zt[i * n];
                double* zi1 = &zt[(i + 1) * n];
                for (std::size_t k = 0; k < n; ++k) {
                    const double u = zi[k], w = zi1[k];
                    zi1[k] = s * u + c * w;
                    zi[k] = c * u - s * w;
                }
            }
            if (underflow) continue;
            d[l] -= p;
            e[l] = g;
            e[mm] = 0.0;
        } while (true);
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return d[i] < d[j]; });
    SplitEigen out{std::vector<double>(n), SplitMatrix(n)};
    for (std::size_t c = 0; c < n; ++c) {
        out.values[c] = d[order[c]];
        const double* z = &zt[order[c] * n];
        for (std::size_t r = 0; r < n; ++r) {
            double sr = 0.0, si = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                sr += q.re[r * n + k] * z[k];
                si += q.im[r * n + k] * z[k];
            }
            out.vectors.re[r * n + c] = sr;
            out.vectors.im[r * n + c] = si;
        }
    }
    return out;
}

// Nearest PSD matrix in Frobenius norm: the Hermitian part minus its
// negative spectral component, or the positive component when that has
// fewer terms.
inline SplitMatrix psd_projection_split(const SplitMatrix& m) {
    const std::size_t n = m.n;
    const SplitEigen e = hermitian_eig_split(m);
    std::size_t negative = 0;
    while (negative < n && e.values[negative] < 0.0) ++negative;
    SplitMatrix out(n);
    auto add = [&](std::size_t col, double w) {
        for (std::size_t r = 0; r < n; ++r) {
            const double ar = w * e.vectors.re[r * n + col], ai = w * e.vectors.im[r * n + col];
            for (std::size_t c = 0; c < n; ++c) {
                const double br = e.vectors.re[c * n + col], bi = e.vectors.im[c * n + col];
                out.re[r * n + c] += ar * br + ai * bi;
                out.im[r * n + c] += ai * br - ar * bi;
            }
        }
    };
    if (negative <= n - negative) {
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < n; ++c) {
                out.re[r * n + c] = 0.5 * (m.re[r * n + c] + m.re[c * n + r]);
                out.im[r * n + c] = 0.5 * (m.im[r * n + c] - m.im[c * n + r]);
            }
        for (std::size_t k = 0; k < negative; ++k) add(k, -e.values[k]);
    } else {
        for (std::size_t k = negative; k < n; ++k) add(k, e.values[k]);
    }
    return out;
}

inline SplitMatrix split(const ComplexMatrix& m) {
    SplitMatrix s(m.dim());
    for (std::size_t r = 0; r < s.n; ++r)
        for (std::size_t c = 0; c < s.n; ++c) {
            s.re[r * s.n + c] = m(r, c).real();
            s.im[r * s.n + c] = m(r, c).imag();
        }
    return s;
}

inline ComplexMatrix join(const SplitMatrix& s) {
    ComplexMatrix m(s.n);
    for (std::size_t r = 0; r < s.n; ++r)
        for (std::size_t c = 0; c < s.n; ++c) m(r, c) = cplx(s.re[r * s.n + c], s.im[r * s.n + c]);
    return m;
}

inline EigenDecomposition hermitian_eig_tridiagonal(const ComplexMatrix& m) {
    SplitEigen e = hermitian_eig_split(split(m));
    return {std::move(e.values), join(e.vectors)};
}

inline ComplexMatrix psd_projection_tridiagonal(const ComplexMatrix& m) { return join(psd_projection_split(split(m))); }

}  // namespace negdim::detail
