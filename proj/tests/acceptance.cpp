// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Reference values come from Eigen (oracle.hpp) wherever a
// spectral quantity is compared.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "negdim/cli.hpp"
#include "negdim/di_bound.hpp"
#include "negdim/moment.hpp"
#include "negdim/negativity.hpp"
#include "negdim/state_factory.hpp"
#include "oracle.hpp"

using namespace negdim;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
    std::printf("[%s] %2d %s: %s\n", pass ? "PASS" : "FAIL", id, name.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

std::string g(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

// valid points of the 100 x 100 grid over the bounding rectangle
std::vector<AxiParams> triangle_grid(int d, int n = 100) {
    std::vector<AxiParams> pts;
    for (const auto& r : cli::axi_scan(d, n))
        if (r.valid) pts.push_back({d, r.x, r.y});
    return pts;
}

AxiParams random_axi_point(int d, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> ux(axi::x_min(d), axi::x_max(d)), uy(axi::y_min(d), axi::y_max(d));
    for (;;) {
        const AxiParams p{d, ux(rng), uy(rng)};
        if (axi::in_triangle(p, 0.0)) return p;
    }
}

ComplexMatrix random_operator(std::size_t d, bool hermitian, std::mt19937_64& rng) {
    const ComplexMatrix g = ginibre(d, rng);
    return hermitian ? (g + g.adjoint()) * 0.5 : g;
}

MeasurementSet random_ops(std::size_t da, std::size_t db, std::size_t ma, std::size_t mb, bool hermitian,
                          std::mt19937_64& rng) {
    std::vector<ComplexMatrix> a{ComplexMatrix::identity(da)}, b{ComplexMatrix::identity(db)};
    for (std::size_t i = 0; i < ma; ++i) a.push_back(random_operator(da, hermitian, rng));
    for (std::size_t i = 0; i < mb; ++i) b.push_back(random_operator(db, hermitian, rng));
    return {a, b};
}

int ceil_class(double ndim, int d) { return std::clamp(ceil_with_slack(ndim), 1, d); }

// ---------------------------------------------------------------------------

void pure_state_counter() {
    const auto t0 = Clock::now();
    double worst = 0.0;
    for (std::size_t k = 1; k <= 6; ++k) {
        const auto s = pure_state_from_schmidt(SchmidtVector::uniform(k), 6, 6);
        worst = std::max(worst, std::abs(ndim(s) - double(k)));
    }
    const double t = seconds_since(t0);
    report(1, "pure-state counter", worst <= 1e-9 && t < 1.0,
           "max |ndim - k| = " + g(worst) + " (tol 1e-9), " + g(t) + " s (limit 1 s)");
}

// Criteria 2, 3 and 6 share the grids.
void axi_grids() {
    double worst_neg = 0.0, t5 = 0.0;
    long points = 0, class_mismatch = 0, witness_mismatch = 0, border_mismatch = 0, ppt_mismatch = 0;
    long borders = 0;
    for (int d = 2; d <= 5; ++d) {
        const auto t0 = Clock::now();
        const auto pts = triangle_grid(d);
        std::vector<double> spectral(pts.size());
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const auto s = axi_state(pts[i]);
            spectral[i] = negativity(s);
            worst_neg = std::max(worst_neg, std::abs(axi_negativity(pts[i]) - spectral[i]));
        }
        if (d == 5) t5 = seconds_since(t0);
        points += static_cast<long>(pts.size());

        std::vector<Witness> witnesses;
        for (int k = 2; k <= d; ++k) witnesses.push_back(schmidt_witness(d, k));
        std::map<std::pair<long, long>, double> ndim_at;  // grid-cell lookup for neighbours
        const double hx = (axi::x_max(d) - axi::x_min(d)) / 99, hy = (axi::y_max(d) - axi::y_min(d)) / 99;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const auto& p = pts[i];
            const auto s = axi_state(p);
            const int k = axi_schmidt_class(p).k;
            // class from the spectral pipeline
            if (k != ceil_class(2.0 * spectral[i] + 1.0, d)) ++class_mismatch;
            if (p.x >= 0.0) {
                int violated = 0;
                for (const auto& w : witnesses)
                    if (witness_value(w, s) < -tol::ceil / d) ++violated;
                if (k != 1 + violated) ++witness_mismatch;
            }
            // criterion 6, min eigenvalue from Eigen
            const bool zero = negativity(s) == 0.0;
            const bool ppt = oracle::min_eigenvalue(oracle::partial_transpose(s.rho(), d, d)) >= -1e-10;
            if (zero != ppt) ++ppt_mismatch;
            ndim_at[{std::lround((p.x - axi::x_min(d)) / hx), std::lround((p.y - axi::y_min(d)) / hy)}] =
                axi_ndim(p);
        }
        // a class border lies between two neighbours exactly when an integer
        // N_dim isoline separates them
        for (const auto& [cell, nd] : ndim_at)
            for (const auto& step : {std::pair<long, long>{1, 0}, std::pair<long, long>{0, 1}}) {
                const auto it = ndim_at.find({cell.first + step.first, cell.second + step.second});
                if (it == ndim_at.end()) continue;
                const double lo = std::min(nd, it->second), hi = std::max(nd, it->second);
                const bool differ = ceil_class(lo, d) != ceil_class(hi, d);
                bool isoline = false;
                for (int m = 1; m < d; ++m)
                    if (lo - tol::ceil <= m && m < hi - tol::ceil) isoline = true;
                borders += differ;
                if (differ != isoline) ++border_mismatch;
            }
    }
    report(2, "closed form vs spectral negativity", worst_neg <= 1e-10 && t5 < 120.0,
           std::to_string(points) + " grid points d=2..5, max diff " + g(worst_neg) + " (tol 1e-10), d=5 in " +
               g(t5) + " s (limit 120 s)");
    report(3, "ceiling classification", class_mismatch == 0 && witness_mismatch == 0 && border_mismatch == 0,
           std::to_string(class_mismatch) + " class/spectral mismatches, " + std::to_string(witness_mismatch) +
               " witness-count mismatches (x >= 0), " + std::to_string(border_mismatch) +
               " border/isoline mismatches over " + std::to_string(borders) + " class borders");
    report(6, "no PPT-entangled axi states", ppt_mismatch == 0,
           std::to_string(ppt_mismatch) + " points where (N == 0) != (min eig of rho^T_A >= -1e-10), " +
               std::to_string(points) + " points");
}

void convexity_bound() {
    long violations = 0, states = 0;
    double worst = -1e300;
    for (int d = 2; d <= 5; ++d)
        for (int k = 1; k <= d; ++k)
            for (std::uint64_t i = 0; i < 500; ++i) {
                const std::uint64_t seed = 1000003ULL * d + 10007ULL * k + i;
                const std::size_t terms = 1 + i % 6;
                const auto s = random_schmidt_rank_k_mixture(d, k, terms, seed);
                const double excess = ndim(s) - k;
                worst = std::max(worst, excess);
                violations += excess > 1e-9;
                ++states;
            }
    report(4, "convexity bound ndim <= k", violations == 0,
           std::to_string(states) + " mixtures, " + std::to_string(violations) + " violations, max ndim - k = " +
               g(worst));
}

void hs_isometry() {
    std::mt19937_64 rng(20240505);
    double worst = 0.0;
    for (int d = 2; d <= 5; ++d)
        for (int i = 0; i < 1000; ++i) {
            const auto p = random_axi_point(d, rng), q = random_axi_point(d, rng);
            const double euclid = std::hypot(p.x - q.x, p.y - q.y);
            // Frobenius norm of the difference from Eigen
            const double hs = (oracle::to_eigen(axi_state(p).rho()) - oracle::to_eigen(axi_state(q).rho())).norm();
            worst = std::max(worst, std::abs(hs - euclid));
        }
    report(5, "Hilbert-Schmidt isometry", worst <= 1e-10,
           "4000 pairs, max |d_HS - d_xy| = " + g(worst) + " (tol 1e-10)");
}

void moment_positivity() {
    std::mt19937_64 rng(777);
    std::uniform_int_distribution<std::size_t> dim(2, 3), ops(0, 3);
    double worst_chi = 1e300, worst_pt = 1e300;
    for (int i = 0; i < 200; ++i) {
        const std::size_t da = dim(rng), db = dim(rng);
        const auto m = random_ops(da, db, ops(rng), ops(rng), i % 2 == 0, rng);
        const auto s = random_density_matrix(da, db, rng, 1 + i % (da * db));
        worst_chi = std::min(worst_chi, oracle::min_eigenvalue(moment_matrix(s, m).entries));
    }
    int ppt_states = 0;
    while (ppt_states < 200) {
        const std::size_t da = dim(rng), db = dim(rng);
        // random states pulled towards the maximally mixed state until PPT
        const auto r = random_density_matrix(da, db, rng);
        const ComplexMatrix mixed = maximally_mixed(da, db).rho();
        ComplexMatrix rho = r.rho();
        for (double p = 1.0; p > 0.0; p -= 0.05) {
            rho = r.rho() * p + mixed * (1.0 - p);
            if (oracle::min_eigenvalue(oracle::partial_transpose(rho, da, db)) >= 0.0) break;
        }
        if (oracle::min_eigenvalue(oracle::partial_transpose(rho, da, db)) < 0.0) continue;
        const BipartiteState s(rho, da, db);
        const auto m = random_ops(da, db, ops(rng), ops(rng), ppt_states % 2 == 0, rng);
        worst_pt = std::min(worst_pt, oracle::min_eigenvalue(moment_partial_transpose(moment_matrix(s, m)).entries));
        ++ppt_states;
    }
    report(7, "moment-matrix positivity", worst_chi >= -1e-9 && worst_pt >= -1e-9,
           "200 pairs: min eig chi = " + g(worst_chi) + "; 200 PPT states: min eig chi^T_A = " + g(worst_pt) +
               " (tol -1e-9)");
}

void variational_equivalence() {
    std::mt19937_64 rng(4242);
    std::uniform_int_distribution<std::size_t> dim(1, 4);
    double worst_value = 0.0, worst_psd = 1e300;
    int entangled = 0;
    for (int i = 0; i < 200; ++i) {
        std::size_t da = dim(rng), db = dim(rng);
        if (da * db == 1) db = 2;
        const auto s = random_density_matrix(da, db, rng, 1 + i % (da * db));
        const auto v = variational_negativity(s);
        const double n = negativity(s);
        entangled += n > 0.0;
        worst_value = std::max({worst_value, std::abs(v.value - n), std::abs(v.value - oracle::negativity(s.rho(), da, db))});
        worst_psd = std::min({worst_psd, oracle::min_eigenvalue(oracle::partial_transpose(v.sigma, da, db)),
                              oracle::min_eigenvalue(oracle::partial_transpose(s.rho() + v.sigma, da, db))});
    }
    report(8, "variational equivalence", worst_value <= 1e-9 && worst_psd >= -1e-9,
           "200 states (" + std::to_string(entangled) + " NPT): max |value - N| = " + g(worst_value) +
               ", min eig of constraints = " + g(worst_psd) + " (tol 1e-9)");
}

void di_soundness_and_tightness() {
    const auto t0 = Clock::now();
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> keep(0.3, 1.0);
    const MeasurementSet pauli(qubit_pauli_ops(), qubit_pauli_ops());
    const MeasurementSet proj(qubit_projector_ops(), qubit_projector_ops());
    const auto pauli_rel = moment_relations(pauli), proj_rel = moment_relations(proj);
    int violations = 0, stalled = 0, bad_certs = 0, positive = 0;
    double worst = -1e300;
    for (int i = 0; i < 100; ++i) {
        std::optional<MeasurementSet> m;
        std::vector<MomentRelation> rels;
        if (i % 5 < 2) {
            m.emplace(pauli);
            rels = pauli_rel;
        } else if (i % 5 == 2) {
            m.emplace(proj);
            rels = proj_rel;
        } else {
            std::uniform_int_distribution<std::size_t> dim(2, 3), ops(1, 2);
            m.emplace(random_ops(dim(rng), dim(rng), ops(rng), ops(rng), true, rng));
            rels = moment_relations(*m);
        }
        const std::size_t rank = 1 + i % 3;
        const auto s = random_density_matrix(m->d_a(), m->d_b(), rng, rank);
        const auto chi = moment_matrix(s, *m);
        const double p = keep(rng);
        std::bernoulli_distribution take(p);
        std::vector<std::pair<std::size_t, std::size_t>> entries{{0, 0}};
        for (std::size_t r = 0; r < chi.entries.dim(); ++r)
            for (std::size_t c = r; c < chi.entries.dim(); ++c)
                if ((r || c) && take(rng)) entries.push_back({r, c});
        DiScenario sc = scenario_from_moments(chi, entries);
        sc.relations = rels;
        const auto r = di_lower_bound(sc);
        const double n = oracle::negativity(s.rho(), m->d_a(), m->d_b());
        worst = std::max(worst, r.bound - n);
        violations += r.bound > n + 1e-6;
        stalled += r.status == DiStatus::Stalled;
        positive += r.bound > 1e-6;
        if (r.certificate && !check_certificate(sc, *r.certificate).ok(1e-8)) ++bad_certs;
    }

    DiScenario bell = scenario_from_moments(moment_matrix(max_entangled(2), pauli));
    bell.relations = pauli_rel;
    const auto rb = di_lower_bound(bell);
    DiScenario sep = scenario_from_moments(moment_matrix(random_product_state(2, 2, rng), pauli));
    sep.relations = pauli_rel;
    const auto rs = di_lower_bound(sep);
    const double t = seconds_since(t0);

    const bool sound = violations == 0 && bad_certs == 0;
    const bool tight = rb.bound >= 0.45 && rb.bound <= 0.5 + 1e-6 && rb.certified_dimensions == 2 &&
                       rs.certified_dimensions == 1;
    char buf[512];
    std::snprintf(buf, sizeof buf,
                  "(a) 100 scenarios, %d violations, max bound - N = %s, %d with positive bound, %d stalled, %d "
                  "invalid certificates; (b) Bell bound %.12f certified %d, separable certified %d; %s s (limit 300 s)",
                  violations, g(worst).c_str(), positive, stalled, bad_certs, rb.bound, rb.certified_dimensions,
                  rs.certified_dimensions, g(t).c_str());
    report(9, "DI soundness and tightness", sound && tight && t < 300.0, buf);
}

void cli_determinism(const std::string& exe) {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / ("negdim_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    std::vector<std::string> outputs;
    bool ran = true;
    for (int i = 0; i < 3; ++i) {
        const fs::path out = dir / ("scan" + std::to_string(i) + ".csv");
        const std::string cmd =
            "\"" + exe + "\" axi-scan --d 4 --grid 50 --out \"" + out.string() + "\" > /dev/null";
        ran = ran && std::system(cmd.c_str()) == 0;
        std::ifstream in(out, std::ios::binary);
        outputs.emplace_back(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    }
    fs::remove_all(dir);
    const bool same = ran && !outputs[0].empty() && outputs[0] == outputs[1] && outputs[1] == outputs[2];
    report(10, "CLI determinism", same,
           "3 runs of axi-scan --d 4 --grid 50, " + std::to_string(outputs[0].size()) + " bytes, " +
               (same ? "byte-identical" : "outputs differ or a run failed"));
}

}  // namespace

int main(int argc, char** argv) {
    const std::string exe = argc > 1 ? argv[1] : "negdim";
    const auto t0 = Clock::now();
    pure_state_counter();
    axi_grids();
    convexity_bound();
    hs_isometry();
    moment_positivity();
    variational_equivalence();
    di_soundness_and_tightness();
    cli_determinism(exe);
    std::printf("%s: %d of 10 criteria failed, %.1f s\n", failures ? "FAILED" : "ALL PASSED", failures,
                seconds_since(t0));
    return failures ? 1 : 0;
}
