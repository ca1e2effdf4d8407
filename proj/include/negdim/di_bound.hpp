#pragma once

// Device-independent lower bound on the negativity from partially known
// moment matrices.
//
//   minimise   (chi_sigma)_{00,00}
//   subject to chi >= 0, chi matches the fixed entries,
//              chi_sigma^{T_A} >= 0, (chi + chi_sigma)^{T_A} >= 0,
//              chi, chi_sigma obey the scenario's structure relations.
//
// Each level t is decided by two projection-splitting runs (Douglas-Rachford
// by default, Dykstra on request) between an affine set with a level
// halfspace and a product of three PSD cones: one looks for a feasible pair
// with objective <= t, the other for dual multipliers proving every feasible
// pair has objective >= t. The reported bound is the value of the best dual
// certificate, so it stays valid when projections converge slowly.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <utility>
#include <vector>

#include "negdim/detail/hermitian_tridiag.hpp"
#include "negdim/detail/real_linalg.hpp"
#include "negdim/errors.hpp"
#include "negdim/moment.hpp"
#include "negdim/negativity.hpp"
#include "negdim/tensor_core.hpp"

namespace negdim {

struct FixedEntry {
    std::size_t i = 0, j = 0, k = 0, l = 0;
    cplx value;
};

struct DiScenario {
    std::size_t m_a = 0;
    std::size_t m_b = 0;
    std::vector<FixedEntry> constraints;
    std::vector<MomentRelation> relations;  // may be empty: unstructured moment space

    std::size_t dim() const noexcept { return moment_dim(m_a, m_b); }
};

inline void validate(const DiScenario& sc) {
    const std::size_t nb = sc.m_b + 1;
    std::map<std::pair<std::size_t, std::size_t>, cplx> seen;
    bool normalised = false;
    for (const auto& e : sc.constraints) {
        if (e.i > sc.m_a || e.k > sc.m_a || e.j > sc.m_b || e.l > sc.m_b) {
            std::ostringstream msg;
            msg << "scenario: entry (" << e.i << ',' << e.j << "),(" << e.k << ',' << e.l
                << ") outside moment indices 0.." << sc.m_a << " x 0.." << sc.m_b;
            throw InvalidScenario(msg.str());
        }
        const std::size_t r = e.i * nb + e.j, c = e.k * nb + e.l;
        if (!std::isfinite(e.value.real()) || !std::isfinite(e.value.imag())) {
            throw InvalidScenario("scenario: non-finite constraint value");
        }
        if (!seen.emplace(std::pair{r, c}, e.value).second) {
            std::ostringstream msg;
            msg << "scenario: duplicate constraint on entry (" << e.i << ',' << e.j << "),(" << e.k << ','
                << e.l << ")";
            throw InvalidScenario(msg.str());
        }
        if (r == 0 && c == 0) {
            if (std::abs(e.value - cplx(1.0, 0.0)) > 1e-12) {
                throw InvalidScenario("scenario: normalisation entry (0,0),(0,0) must equal 1");
            }
            normalised = true;
        }
    }
    if (!normalised) throw InvalidScenario("scenario: missing normalisation entry (0,0),(0,0) = 1");
    for (const auto& [rc, v] : seen) {
        const auto it = seen.find({rc.second, rc.first});
        if (rc.first < rc.second && it != seen.end() && std::abs(it->second - std::conj(v)) > 1e-12) {
            throw InvalidScenario("scenario: conjugate entries are inconsistent with a Hermitian moment matrix");
        }
    }
    for (const auto& rel : sc.relations)
        for (const auto& t : rel)
            if (t.i > sc.m_a || t.k > sc.m_a || t.j > sc.m_b || t.l > sc.m_b) {
                throw InvalidScenario("scenario: relation term outside moment indices");
            }
}

// Scenario fixing the listed entries of chi (all entries when `entries` is
// empty), with the entry ((0,0),(0,0)) always included.
inline DiScenario scenario_from_moments(const MomentMatrix& chi,
                                        const std::vector<std::pair<std::size_t, std::size_t>>& entries = {}) {
    DiScenario sc{chi.m_a, chi.m_b, {}, {}};
    const std::size_t n = chi.entries.dim(), nb = chi.m_b + 1;
    auto add = [&](std::size_t r, std::size_t c) {
        const cplx v = (r == 0 && c == 0) ? cplx(1.0, 0.0) : chi.entries(r, c);
        sc.constraints.push_back({r / nb, r % nb, c / nb, c % nb, v});
    };
    if (entries.empty()) {
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < n; ++c) add(r, c);
        return sc;
    }
    add(0, 0);
    for (auto [r, c] : entries)
        if (r != 0 || c != 0) add(r, c);
    return sc;
}

enum class DiStatus { Converged, Stalled };

enum class ProjectionMethod { DouglasRachford, Dykstra };

inline const char* to_string(DiStatus s) { return s == DiStatus::Converged ? "converged" : "stalled"; }

// Feasible pair; its objective (chi_sigma)_{00,00} is an upper bound on the
// optimum.
struct DiCertificate {
    MomentMatrix chi;
    MomentMatrix chi_sigma;
};

// PSD multipliers with
//   <s_chi, chi> + <s_y, chi_sigma^T> + <s_z, (chi + chi_sigma)^T> = (chi_sigma)_{00,00} - value
// for every pair that matches the constraints and relations, so every
// feasible pair has objective >= value.
struct DiDualCertificate {
    ComplexMatrix s_chi;
    ComplexMatrix s_y;
    ComplexMatrix s_z;
    double value = 0.0;
};

struct DiOptions {
    ProjectionMethod method = ProjectionMethod::DouglasRachford;
    double feasibility_tol = 1e-8;  // residual between affine and cone iterates
    int max_iterations = 5000;      // per feasibility problem and side
    double bisection_tol = 1e-7;
    double converged_gap = 1e-6;    // certified upper minus certified lower level
    int chunk = 100;                // primal and dual runs alternate in chunks
    int plateau_min_iterations = 500;
    double plateau_rel_decrease = 1e-3;
    int max_undecided = 3;          // bisection stops after this many levels neither side decides
    // called after every bisection step: level, verdict (1 feasible,
    // -1 infeasible, 0 undecided), iterations, residual of the deciding run;
    // the closing joint run reports verdict 2 when it converges
    std::function<void(double, int, int, double)> trace;
};

struct DiResult {
    double bound = 0.0;  // valid lower bound on the negativity
    double upper = std::numeric_limits<double>::infinity();  // objective of the certificate
    double ndim_bound = 1.0;
    int certified_dimensions = 1;
    DiStatus status = DiStatus::Stalled;
    std::optional<DiCertificate> certificate;
    std::optional<DiDualCertificate> dual_certificate;
    double primal_residual = std::numeric_limits<double>::infinity();
    double dual_residual = std::numeric_limits<double>::infinity();
    long iterations = 0;
    int bisection_steps = 0;
    int undecided_steps = 0;
};

struct CertificateCheck {
    double min_eig_chi = 0.0;
    double min_eig_sigma_pt = 0.0;
    double min_eig_sum_pt = 0.0;
    double max_entry_mismatch = 0.0;
    double max_relation_violation = 0.0;
    double objective = 0.0;

    bool ok(double tol = 1e-8) const {
        return min_eig_chi >= -tol && min_eig_sigma_pt >= -tol && min_eig_sum_pt >= -tol &&
               max_entry_mismatch <= tol && max_relation_violation <= tol;
    }
};

inline CertificateCheck check_certificate(const DiScenario& sc, const DiCertificate& cert) {
    const std::size_t nb = sc.m_b + 1;
    CertificateCheck out;
    const ComplexMatrix& chi = cert.chi.entries;
    const ComplexMatrix& sig = cert.chi_sigma.entries;
    if (chi.dim() != sc.dim() || sig.dim() != sc.dim()) throw DimensionMismatch("certificate: wrong moment dimension");
    out.min_eig_chi = min_eigenvalue(chi);
    out.min_eig_sigma_pt = min_eigenvalue(moment_partial_transpose(sig, sc.m_a, sc.m_b));
    out.min_eig_sum_pt = min_eigenvalue(moment_partial_transpose(chi + sig, sc.m_a, sc.m_b));
    for (const auto& e : sc.constraints) {
        out.max_entry_mismatch =
            std::max(out.max_entry_mismatch, std::abs(chi(e.i * nb + e.j, e.k * nb + e.l) - e.value));
    }
    for (const auto& rel : sc.relations) {
        cplx a = 0.0, b = 0.0;
        for (const auto& t : rel) {
            a += t.coeff * chi(t.i * nb + t.j, t.k * nb + t.l);
            b += t.coeff * sig(t.i * nb + t.j, t.k * nb + t.l);
        }
        out.max_relation_violation = std::max({out.max_relation_violation, std::abs(a), std::abs(b)});
    }
    out.objective = sig(0, 0).real();
    return out;
}

// Left-hand side of the dual identity for a given pair; equals
// (chi_sigma)_{00,00} - value when the pair is admissible.
inline double dual_pairing(const DiDualCertificate& d, const MomentMatrix& chi, const MomentMatrix& chi_sigma) {
    const ComplexMatrix y = moment_partial_transpose(chi_sigma).entries;
    const ComplexMatrix z = moment_partial_transpose(MomentMatrix{chi.m_a, chi.m_b, chi.entries + chi_sigma.entries}).entries;
    return hs_inner(d.s_chi, chi.entries).real() + hs_inner(d.s_y, y).real() + hs_inner(d.s_z, z).real();
}

namespace detail {

using Blocks = std::vector<Vec>;

inline double blocks_dot(const Blocks& a, const Blocks& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += dot(a[k], b[k]);
    return s;
}

// Splitting iterations between an affine-type set (given by its projector)
// and the product of three PSD cones. Resumable so that two runs can be
// interleaved. The residual is the distance between the current affine point
// and cone point.
class ConeSplitting {
public:
    using Projector = std::function<Blocks(const Blocks&)>;

    ConeSplitting(ProjectionMethod method, Projector affine, Blocks start, const HermitianCoords& coords)
        : method_(method), affine_(std::move(affine)), coords_(coords), x_(std::move(start)),
          p_(x_.size()), q_(x_.size()) {
        for (std::size_t b = 0; b < x_.size(); ++b) {
            p_[b].assign(x_[b].size(), 0.0);
            q_[b].assign(x_[b].size(), 0.0);
        }
        // Douglas-Rachford keeps its governing sequence in p_
        if (method_ == ProjectionMethod::DouglasRachford) p_ = x_;
    }

    // Up to n more iterations; true once the residual drops below tol.
    bool advance(int n, double tol) {
        for (int k = 0; k < n; ++k) {
            const double r = method_ == ProjectionMethod::Dykstra ? dykstra_step() : douglas_rachford_step();
            residual_ = r;
            best_ = std::min(best_, r);
            if (++iterations_ % 50 == 0) history_.push_back(best_);
            if (r < tol) return true;
        }
        return false;
    }

    // The smallest residual has stopped improving: over the second half of
    // the run it fell by less than `rel` of its value.
    bool plateau(int min_iterations, double rel) const {
        if (iterations_ < min_iterations || history_.size() < 2) return false;
        const double half = history_[history_.size() / 2 - 1];
        return half - best_ <= rel * best_;
    }

    double residual() const noexcept { return residual_; }
    int iterations() const noexcept { return iterations_; }
    const Blocks& affine_point() const noexcept { return y_; }
    const Blocks& cone_point() const noexcept { return x_; }

private:
    Vec project_cone(const Vec& v) const {
        const std::size_t n = coords_.n();
        const double h = 1.0 / std::sqrt(2.0);
        SplitMatrix m(n);
        for (std::size_t r = 0; r < n; ++r) m.re[r * n + r] = v[r];
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = r + 1; c < n; ++c) {
                const std::size_t k = coords_.pair(r, c);
                m.re[r * n + c] = m.re[c * n + r] = h * v[k];
                m.im[r * n + c] = h * v[k + 1];
                m.im[c * n + r] = -h * v[k + 1];
            }
        const SplitMatrix p = psd_projection_split(m);
        Vec out(v.size());
        for (std::size_t r = 0; r < n; ++r) out[r] = p.re[r * n + r];
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = r + 1; c < n; ++c) {
                const std::size_t k = coords_.pair(r, c);
                out[k] = h * (p.re[r * n + c] + p.re[c * n + r]);
                out[k + 1] = h * (p.im[r * n + c] - p.im[c * n + r]);
            }
        return out;
    }

    // y = P_L(x + p), p += x - y; x = P_C(y + q), q += y - x
    double dykstra_step() {
        Blocks target(x_.size());
        double r2 = 0.0;
        for (std::size_t b = 0; b < x_.size(); ++b) {
            target[b] = x_[b];
            axpy(1.0, p_[b], target[b]);
        }
        y_ = affine_(target);
        for (std::size_t b = 0; b < x_.size(); ++b) {
            for (std::size_t c = 0; c < target[b].size(); ++c) p_[b][c] = target[b][c] - y_[b][c];
            target[b] = y_[b];
            axpy(1.0, q_[b], target[b]);
            x_[b] = project_cone(target[b]);
            for (std::size_t c = 0; c < target[b].size(); ++c) {
                q_[b][c] = target[b][c] - x_[b][c];
                const double d = x_[b][c] - y_[b][c];
                r2 += d * d;
            }
        }
        return std::sqrt(r2);
    }

    // y = P_L(z), x = P_C(2y - z), z += x - y
    double douglas_rachford_step() {
        double r2 = 0.0;
        y_ = affine_(p_);
        for (std::size_t b = 0; b < x_.size(); ++b) {
            Vec reflected = y_[b];
            for (std::size_t c = 0; c < reflected.size(); ++c) reflected[c] = 2.0 * y_[b][c] - p_[b][c];
            x_[b] = project_cone(reflected);
            for (std::size_t c = 0; c < reflected.size(); ++c) {
                const double d = x_[b][c] - y_[b][c];
                p_[b][c] += d;
                r2 += d * d;
            }
        }
        return std::sqrt(r2);
    }

    ProjectionMethod method_;
    Projector affine_;
    const HermitianCoords& coords_;
    Blocks x_, y_, p_, q_;
    double residual_ = std::numeric_limits<double>::infinity();
    double best_ = std::numeric_limits<double>::infinity();
    int iterations_ = 0;
    std::vector<double> history_;
};

// Real coordinates z = (chi, Y, Z) with Y = chi_sigma^T and
// Z = chi^T + Y. The admissible set is z = l0 + J w with
// w = (u, v): chi = chi0 + F u, Y = G v, where F spans the free directions
// of chi and G the partial transposes of the structure basis.
class DiProblem {
public:
    explicit DiProblem(const DiScenario& sc) : sc_(sc), coords_(sc.dim()), n_(coords_.size()) {
        build_structure();
        build_affine();
    }

    const HermitianCoords& coords() const noexcept { return coords_; }

    Blocks primal_start() const { return {chi0_, Vec(n_, 0.0), gamma_chi0_}; }

    // (0, E_00, 0) is always dual feasible with value 0.
    Blocks dual_start() const {
        Blocks v{Vec(n_, 0.0), Vec(n_, 0.0), Vec(n_, 0.0)};
        v[1][0] = 1.0;
        return v;
    }

    // Nearest admissible point with (chi_sigma)_{00,00} <= t.
    Blocks project_primal(const Blocks& a, double t) const {
        Blocks d = a;
        axpy(-1.0, chi0_, d[0]);
        axpy(-1.0, gamma_chi0_, d[2]);
        Vec w = normal_.solve(adjoint(d));
        const double level = dot(level_, w);
        if (level > t && level_norm_ > 0.0) axpy(-(level - t) / level_norm_, level_solved_, w);
        Blocks out = apply(w);
        axpy(1.0, chi0_, out[0]);
        axpy(1.0, gamma_chi0_, out[2]);
        return out;
    }

    // Nearest point of { V : J^T V = level gradient, -<V, l0> >= t }.
    Blocks project_dual(const Blocks& a, double t) const {
        Vec r = adjoint(a);
        axpy(-1.0, level_, r);
        Blocks out = a;
        const Blocks corr = apply(normal_.solve(r));
        for (int b = 0; b < 3; ++b) axpy(-1.0, corr[b], out[b]);
        const double excess = dual_objective_coeff(out) + t;
        if (excess > 0.0 && null_l0_norm_ > 0.0) {
            for (int b = 0; b < 3; ++b) axpy(-excess / null_l0_norm_, null_l0_[b], out[b]);
        }
        return out;
    }

    // Pairs (z, V) of an admissible point and dual multipliers whose objective
    // and value coincide; blocks 0..2 hold z, blocks 3..5 hold V.
    Blocks project_joint(const Blocks& a) const {
        Blocks d(a.begin(), a.begin() + 3), v(a.begin() + 3, a.end());
        axpy(-1.0, chi0_, d[0]);
        axpy(-1.0, gamma_chi0_, d[2]);
        Vec w = normal_.solve(adjoint(d));
        Vec r = adjoint(v);
        axpy(-1.0, level_, r);
        const Blocks corr = apply(normal_.solve(r));
        for (int b = 0; b < 3; ++b) axpy(-1.0, corr[b], v[b]);
        const double denom = level_norm_ + null_l0_norm_;
        if (denom > 0.0) {
            const double step = (dot(level_, w) + dual_objective_coeff(v)) / denom;
            axpy(-step, level_solved_, w);
            for (int b = 0; b < 3; ++b) axpy(-step, null_l0_[b], v[b]);
        }
        Blocks out = apply(w);
        axpy(1.0, chi0_, out[0]);
        axpy(1.0, gamma_chi0_, out[2]);
        out.insert(out.end(), v.begin(), v.end());
        return out;
    }

    double primal_objective(const Blocks& z) const { return z[1][0]; }
    double dual_value(const Blocks& v) const { return -dual_objective_coeff(v); }

    DiCertificate primal_certificate(const Blocks& z) const {
        const ComplexMatrix chi = coords_.to_matrix(z[0]);
        const ComplexMatrix sigma = moment_partial_transpose(coords_.to_matrix(z[1]), sc_.m_a, sc_.m_b);
        return {{sc_.m_a, sc_.m_b, chi}, {sc_.m_a, sc_.m_b, sigma}};
    }

    DiDualCertificate dual_certificate(const Blocks& v) const {
        return {coords_.to_matrix(v[0]), coords_.to_matrix(v[1]), coords_.to_matrix(v[2]), dual_value(v)};
    }

private:
    double dual_objective_coeff(const Blocks& v) const { return dot(v[0], chi0_) + dot(v[2], gamma_chi0_); }

    Vec gamma(const Vec& v) const {
        return coords_.to_vec(moment_partial_transpose(coords_.to_matrix(v), sc_.m_a, sc_.m_b));
    }

    // J^T a
    Vec adjoint(const Blocks& a) const {
        const std::size_t nf = free_.size(), ns = structure_.size();
        Vec out(nf + ns);
        for (std::size_t k = 0; k < nf; ++k) out[k] = dot(free_[k], a[0]) + dot(gamma_free_[k], a[2]);
        for (std::size_t k = 0; k < ns; ++k) out[nf + k] = dot(gamma_structure_[k], a[1]) + dot(gamma_structure_[k], a[2]);
        return out;
    }

    // J w
    Blocks apply(const Vec& w) const {
        const std::size_t nf = free_.size(), ns = structure_.size();
        Blocks out{Vec(n_, 0.0), Vec(n_, 0.0), Vec(n_, 0.0)};
        for (std::size_t k = 0; k < nf; ++k) {
            axpy(w[k], free_[k], out[0]);
            axpy(w[k], gamma_free_[k], out[2]);
        }
        for (std::size_t k = 0; k < ns; ++k) {
            axpy(w[nf + k], gamma_structure_[k], out[1]);
            axpy(w[nf + k], gamma_structure_[k], out[2]);
        }
        return out;
    }

    void build_structure() {
        if (sc_.relations.empty()) {
            structure_.assign(n_, Vec(n_, 0.0));
            for (std::size_t i = 0; i < n_; ++i) structure_[i][i] = 1.0;
            return;
        }
        const auto rows = relation_rows(sc_.relations, sc_.m_a, sc_.m_b);
        const auto ortho = orthonormalize_rows(rows, Vec(rows.size(), 0.0), 1e-10);
        structure_ = orthogonal_complement(ortho.rows, n_);
    }

    void build_affine() {
        const std::size_t nb = sc_.m_b + 1, r = structure_.size();
        std::vector<Vec> rows;
        Vec rhs;
        for (const auto& e : sc_.constraints) {
            const std::size_t row = e.i * nb + e.j, col = e.k * nb + e.l;
            for (int part = 0; part < 2; ++part) {
                Vec full(n_, 0.0);
                coords_.add_real_part(full, row, col, part == 0 ? cplx(1.0, 0.0) : cplx(0.0, -1.0));
                Vec reduced(r);
                for (std::size_t b = 0; b < r; ++b) reduced[b] = dot(structure_[b], full);
                if (norm(reduced) < 1e-10 * norm(full)) std::fill(reduced.begin(), reduced.end(), 0.0);
                rows.push_back(std::move(reduced));
                rhs.push_back(part == 0 ? e.value.real() : e.value.imag());
            }
        }
        const auto sys = orthonormalize_rows(rows, rhs, 1e-10);
        Vec a0(r, 0.0);
        for (std::size_t k = 0; k < sys.rows.size(); ++k) axpy(sys.rhs[k], sys.rows[k], a0);
        chi0_.assign(n_, 0.0);
        for (std::size_t b = 0; b < r; ++b) axpy(a0[b], structure_[b], chi0_);

        const ComplexMatrix chi0 = coords_.to_matrix(chi0_);
        double mismatch = 0.0;
        for (const auto& e : sc_.constraints) {
            mismatch = std::max(mismatch, std::abs(chi0(e.i * nb + e.j, e.k * nb + e.l) - e.value));
        }
        if (mismatch > 1e-8) {
            std::ostringstream msg;
            msg << "di_lower_bound: no moment matrix matches the constraints (mismatch " << mismatch << ")";
            throw Infeasible(msg.str());
        }

        for (const auto& c : orthogonal_complement(sys.rows, r)) {
            Vec f(n_, 0.0);
            for (std::size_t b = 0; b < r; ++b) axpy(c[b], structure_[b], f);
            free_.push_back(std::move(f));
        }
        for (const auto& f : free_) gamma_free_.push_back(gamma(f));
        for (const auto& s : structure_) gamma_structure_.push_back(gamma(s));
        gamma_chi0_ = gamma(chi0_);

        // J^T J = [[2, K], [K^T, 2]], K = (Gamma F)^T G
        const std::size_t nf = free_.size(), ns = structure_.size();
        std::vector<Vec> h(nf + ns, Vec(nf + ns, 0.0));
        for (std::size_t a = 0; a < nf + ns; ++a) h[a][a] = 2.0;
        for (std::size_t a = 0; a < nf; ++a)
            for (std::size_t b = 0; b < ns; ++b) {
                const double k = dot(gamma_free_[a], gamma_structure_[b]);
                h[a][nf + b] = k;
                h[nf + b][a] = k;
            }
        normal_ = CholeskySolver(h);

        // objective (chi_sigma)_{00,00} = Y_00 = level . w
        level_.assign(nf + ns, 0.0);
        for (std::size_t b = 0; b < ns; ++b) level_[nf + b] = gamma_structure_[b][0];
        level_solved_ = normal_.solve(level_);
        level_norm_ = dot(level_, level_solved_);

        // component of l0 = (chi0, 0, Gamma chi0) orthogonal to the range of J
        null_l0_ = {chi0_, Vec(n_, 0.0), gamma_chi0_};
        const Blocks along = apply(normal_.solve(adjoint(null_l0_)));
        for (int b = 0; b < 3; ++b) axpy(-1.0, along[b], null_l0_[b]);
        null_l0_norm_ = blocks_dot(null_l0_, null_l0_);
        if (null_l0_norm_ < 1e-24) null_l0_norm_ = 0.0;
    }

    const DiScenario& sc_;
    HermitianCoords coords_;
    std::size_t n_;
    std::vector<Vec> structure_, free_, gamma_free_, gamma_structure_;
    Vec chi0_, gamma_chi0_;
    CholeskySolver normal_;
    Vec level_, level_solved_;
    double level_norm_ = 0.0;
    Blocks null_l0_;
    double null_l0_norm_ = 0.0;
};

}  // namespace detail

inline void finish_bounds(DiResult& r) {
    r.ndim_bound = 2.0 * r.bound + 1.0;
    r.certified_dimensions = std::max(1, static_cast<int>(std::ceil(r.ndim_bound - 1e-6)));
}

inline DiResult di_lower_bound(const DiScenario& sc, const DiOptions& opt = {}) {
    validate(sc);
    const detail::DiProblem problem(sc);
    using detail::Blocks;
    using detail::ConeSplitting;
    constexpr double inf = std::numeric_limits<double>::infinity();
    DiResult out;

    auto accept_dual = [&](const Blocks& v, double residual) {
        if (out.dual_certificate && problem.dual_value(v) <= out.dual_certificate->value) return;
        out.dual_certificate = problem.dual_certificate(v);
        out.bound = std::max(0.0, out.dual_certificate->value);
        out.dual_residual = residual;
    };
    auto accept_primal = [&](const Blocks& z, double residual) {
        if (out.certificate && problem.primal_objective(z) >= out.upper) return;
        out.certificate = problem.primal_certificate(z);
        out.upper = problem.primal_objective(z);
        out.primal_residual = residual;
    };
    accept_dual(problem.dual_start(), 0.0);

    // feasibility of the constraints themselves
    ConeSplitting phase1(opt.method, [&](const Blocks& a) { return problem.project_primal(a, inf); },
                         problem.primal_start(), problem.coords());
    bool found = false;
    while (!found && phase1.iterations() < opt.max_iterations) {
        found = phase1.advance(opt.chunk, opt.feasibility_tol);
        if (!found && phase1.plateau(opt.plateau_min_iterations, opt.plateau_rel_decrease)) {
            std::ostringstream msg;
            msg << "di_lower_bound: constraints admit no positive semidefinite moment matrix (residual "
                << phase1.residual() << ")";
            throw Infeasible(msg.str());
        }
    }
    out.iterations += phase1.iterations();
    if (!found) {
        finish_bounds(out);
        return out;
    }
    accept_primal(phase1.affine_point(), phase1.residual());

    Blocks warm_primal = phase1.cone_point(), warm_dual = problem.dual_start();
    // primal and dual together, constrained to equal objective and value
    {
        Blocks start = warm_primal;
        start.insert(start.end(), warm_dual.begin(), warm_dual.end());
        ConeSplitting joint(opt.method, [&](const Blocks& a) { return problem.project_joint(a); }, std::move(start),
                            problem.coords());
        const bool closed = joint.advance(opt.max_iterations, opt.feasibility_tol);
        out.iterations += joint.iterations();
        if (closed) {
            const Blocks& pair = joint.affine_point();
            accept_primal(Blocks(pair.begin(), pair.begin() + 3), joint.residual());
            accept_dual(Blocks(pair.begin() + 3, pair.end()), joint.residual());
        }
        if (opt.trace) opt.trace(out.upper, closed ? 2 : 0, joint.iterations(), joint.residual());
    }

    double search_hi = std::max(out.upper, out.bound);
    auto step = [&](double t) {
        ConeSplitting primal(opt.method, [&, t](const Blocks& a) { return problem.project_primal(a, t); },
                             warm_primal, problem.coords());
        ConeSplitting dual(opt.method, [&, t](const Blocks& a) { return problem.project_dual(a, t); }, warm_dual,
                           problem.coords());
        int verdict = 0;
        double residual = 0.0;
        while (verdict == 0 &&
               (primal.iterations() < opt.max_iterations || dual.iterations() < opt.max_iterations)) {
            if (dual.iterations() < opt.max_iterations && dual.advance(opt.chunk, opt.feasibility_tol)) {
                verdict = -1;
                residual = dual.residual();
                accept_dual(dual.affine_point(), residual);
                warm_dual = dual.cone_point();
            } else if (primal.iterations() < opt.max_iterations &&
                       primal.advance(opt.chunk, opt.feasibility_tol)) {
                verdict = 1;
                residual = primal.residual();
                accept_primal(primal.affine_point(), residual);
                warm_primal = primal.cone_point();
            }
        }
        out.iterations += primal.iterations() + dual.iterations();
        ++out.bisection_steps;
        if (verdict == 0) {
            ++out.undecided_steps;
            residual = std::min(primal.residual(), dual.residual());
            search_hi = t;
        } else if (verdict == 1) {
            search_hi = std::min(search_hi, out.upper);
        }
        if (opt.trace) opt.trace(t, verdict, primal.iterations() + dual.iterations(), residual);
    };

    // bisection on the level when the joint run did not close the gap;
    // scenarios without certifiable entanglement usually stop at the first step
    if (out.upper - out.bound > opt.converged_gap) {
        if (search_hi - out.bound > opt.bisection_tol) step(out.bound + opt.bisection_tol);
        for (int guard = 0; search_hi - out.bound > opt.bisection_tol && guard < 200 && out.undecided_steps < opt.max_undecided;
             ++guard) {
            step(0.5 * (out.bound + search_hi));
        }
    }

    out.status = out.upper - out.bound <= opt.converged_gap ? DiStatus::Converged : DiStatus::Stalled;
    finish_bounds(out);
    return out;
}

// Structure relations derived from the devices when the scenario has none.
inline DiResult di_lower_bound(DiScenario sc, const MeasurementSet& m, const DiOptions& opt = {}) {
    if (sc.m_a != m.m_a() || sc.m_b != m.m_b()) {
        throw DimensionMismatch("di_lower_bound: scenario and measurement set have different operator counts");
    }
    if (sc.relations.empty()) sc.relations = moment_relations(m);
    return di_lower_bound(sc, opt);
}

}  // namespace negdim
