#pragma once

// Command-line front-end. `run` is the whole program; main() only forwards
// argv and the standard streams.
//
//   negativity <state-file> [--json <out>]
//   axi-scan --d <int> --grid <int> --out <path> [--format csv|json]
//   di-bound <scenario-file> --out <path> [--method dr|dykstra] [--max-iterations <n>]
//   make-scenario <state-file> --out <path> [--ops pauli|projectors] [--no-relations]
//
// Exit codes: 0 ok, 2 usage/parse/io error, 3 state invariant violated,
// 4 infeasible scenario, 5 solver stalled (report still written).

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <optional>
#include <iostream>
#include <string>
#include <vector>

#include "negdim/di_bound.hpp"
#include "negdim/io.hpp"
#include "negdim/moment.hpp"
#include "negdim/negativity.hpp"
#include "negdim/state_factory.hpp"

namespace negdim::cli {

enum ExitCode : int { ok = 0, usage = 2, invariant = 3, infeasible = 4, stalled = 5 };

struct ScanRow {
    double x = 0.0;
    double y = 0.0;
    bool valid = false;
    double negativity = 0.0;
    double n_dim = 0.0;
    int schmidt_class = 0;
};

// grid_n x grid_n samples of the bounding rectangle including its edges,
// y in the outer loop and x in the inner one.
inline std::vector<ScanRow> axi_scan(int d, int grid_n) {
    if (d < 2) throw InvalidDimension("axi-scan: d must be >= 2");
    if (grid_n < 2) throw std::invalid_argument("axi-scan: grid must be >= 2");
    const double x0 = axi::x_min(d), x1 = axi::x_max(d), y0 = axi::y_min(d), y1 = axi::y_max(d);
    std::vector<ScanRow> rows;
    rows.reserve(static_cast<std::size_t>(grid_n) * grid_n);
    for (int iy = 0; iy < grid_n; ++iy)
        for (int ix = 0; ix < grid_n; ++ix) {
            ScanRow r;
            r.x = std::lerp(x0, x1, double(ix) / (grid_n - 1));
            r.y = std::lerp(y0, y1, double(iy) / (grid_n - 1));
            const AxiParams p{d, r.x, r.y};
            r.valid = axi::in_triangle(p);
            if (r.valid) {
                r.negativity = axi_negativity(p);
                r.n_dim = axi_ndim(p);
                r.schmidt_class = axi_schmidt_class(p).k;
            }
            rows.push_back(r);
        }
    return rows;
}

inline void write_scan_csv(std::ostream& out, const std::vector<ScanRow>& rows) {
    out << "x,y,valid,negativity,n_dim,schmidt_class\n";
    for (const auto& r : rows) {
        out << io::fmt(r.x) << ',' << io::fmt(r.y) << ',' << (r.valid ? "true" : "false");
        if (r.valid) {
            out << ',' << io::fmt(r.negativity) << ',' << io::fmt(r.n_dim) << ',' << r.schmidt_class << '\n';
        } else {
            out << ",,,\n";
        }
    }
}

inline void write_scan_json(std::ostream& out, int d, int grid_n, const std::vector<ScanRow>& rows) {
    out << "{\"d\": " << d << ", \"grid\": " << grid_n << ", \"points\": [\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        io::JsonObject o;
        o.add("x", r.x).add("y", r.y).add("valid", r.valid);
        if (r.valid) {
            o.add("negativity", r.negativity).add("n_dim", r.n_dim).add("schmidt_class", r.schmidt_class);
        } else {
            o.null("negativity").null("n_dim").null("schmidt_class");
        }
        out << "  " << o.str() << (i + 1 < rows.size() ? ",\n" : "\n");
    }
    out << "]}\n";
}

namespace detail {

inline bool write_file(const std::string& path, const std::string& text, std::ostream& err) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!(f << text) || !f.flush()) {
        err << "error: cannot write " << path << '\n';
        return false;
    }
    return true;
}

inline int cmd_negativity(const std::string& path, const std::string& json_out, std::ostream& out,
                          std::ostream& err) {
    io::StateData data;
    try {
        data = io::read_state_data(path);
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << '\n';
        return usage;
    }
    std::optional<BipartiteState> s;
    try {
        s.emplace(io::to_state(std::move(data)));
    } catch (const Error& e) {
        err << "invalid state: " << e.what() << '\n';
        return invariant;
    }
    const double n = negativity(*s);
    const double nd = ndim(*s);
    const int k = schmidt_number_lower_bound(*s).k;
    const bool ppt = n == 0.0;
    io::JsonObject o;
    o.add("negativity", n).add("n_dim", nd).add("schmidt_lower_bound", k).add("ppt", ppt);
    out << "negativity          " << io::fmt(n) << '\n'
        << "n_dim               " << io::fmt(nd) << '\n'
        << "schmidt_lower_bound " << k << '\n'
        << "ppt                 " << (ppt ? "true" : "false") << '\n';
    if (!json_out.empty() && !write_file(json_out, o.str() + "\n", err)) return usage;
    return ok;
}

inline int cmd_axi_scan(int d, int grid_n, const std::string& path, const std::string& format, std::ostream& out,
                        std::ostream& err) {
    const auto rows = axi_scan(d, grid_n);
    std::ostringstream text;
    if (format == "json") {
        write_scan_json(text, d, grid_n, rows);
    } else {
        write_scan_csv(text, rows);
    }
    if (!write_file(path, text.str(), err)) return usage;
    std::size_t valid = 0;
    for (const auto& r : rows) valid += r.valid;
    out << "wrote " << rows.size() << " rows (" << valid << " inside the triangle) to " << path << '\n';
    return ok;
}

inline int cmd_di_bound(const std::string& path, const std::string& report, const std::string& method,
                        int max_iterations, std::ostream& out, std::ostream& err) {
    DiScenario sc;
    try {
        sc = io::read_scenario(path);
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << '\n';
        return usage;
    }
    DiOptions opt;
    if (method == "dykstra") opt.method = ProjectionMethod::Dykstra;
    opt.max_iterations = max_iterations;
    DiResult r;
    try {
        r = di_lower_bound(sc, opt);
    } catch (const Infeasible& e) {
        io::JsonObject o;
        o.add("status", "infeasible").add("message", std::string(e.what()));
        write_file(report, o.str() + "\n", err);
        err << "infeasible: " << e.what() << '\n';
        return infeasible;
    }
    io::JsonObject o;
    o.add("status", to_string(r.status))
        .add("bound", r.bound)
        .add("ndim_bound", r.ndim_bound)
        .add("certified_dimensions", r.certified_dimensions)
        .add("upper", r.upper)
        .add("primal_residual", r.primal_residual)
        .add("dual_residual", r.dual_residual)
        .add("iterations", r.iterations)
        .add("bisection_steps", r.bisection_steps)
        .add("undecided_steps", r.undecided_steps)
        .add("method", method)
        .add("m_a", static_cast<int>(sc.m_a))
        .add("m_b", static_cast<int>(sc.m_b))
        .add("constraints", static_cast<int>(sc.constraints.size()))
        .add("relations", static_cast<int>(sc.relations.size()));
    if (!write_file(report, o.str() + "\n", err)) return usage;
    out << "bound                " << io::fmt(r.bound) << '\n'
        << "ndim_bound           " << io::fmt(r.ndim_bound) << '\n'
        << "certified_dimensions " << r.certified_dimensions << '\n'
        << "status               " << to_string(r.status) << '\n';
    return r.status == DiStatus::Converged ? ok : stalled;
}

inline int cmd_make_scenario(const std::string& path, const std::string& report, const std::string& ops,
                             bool relations, std::ostream& out, std::ostream& err) {
    std::optional<BipartiteState> s;
    try {
        s.emplace(io::read_state(path));
    } catch (const ParseError& e) {
        err << "parse error: " << e.what() << '\n';
        return usage;
    } catch (const Error& e) {
        err << "invalid state: " << e.what() << '\n';
        return invariant;
    }
    if (s->d_a() != 2 || s->d_b() != 2) {
        err << "make-scenario: built-in operator sets act on two qubits, state is " << s->d_a() << 'x' << s->d_b()
            << '\n';
        return usage;
    }
    const auto list = ops == "projectors" ? qubit_projector_ops() : qubit_pauli_ops();
    const MeasurementSet m(list, list);
    DiScenario sc = scenario_from_moments(moment_matrix(*s, m));
    if (relations) sc.relations = moment_relations(m);
    std::ostringstream text;
    io::write_scenario(text, sc);
    if (!write_file(report, text.str(), err)) return usage;
    out << "wrote " << sc.constraints.size() << " entries and " << sc.relations.size() << " relations to "
        << report << '\n';
    return ok;
}

}  // namespace detail

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Negativity, Schmidt-number and device-independent dimension tools", "negdim"};
    app.require_subcommand(1);

    std::string state_path, json_out;
    auto* neg = app.add_subcommand("negativity", "negativity, N_dim, Schmidt lower bound and PPT flag of a state");
    neg->add_option("state", state_path, "state file (qstate v1)")->required();
    neg->add_option("--json", json_out, "also write a JSON report here");

    int d = 0, grid_n = 0;
    std::string scan_out, format = "csv";
    auto* scan = app.add_subcommand("axi-scan", "grid scan of the axisymmetric triangle");
    scan->add_option("--d", d, "local dimension")->required()->check(CLI::Range(2, 64));
    scan->add_option("--grid", grid_n, "samples per axis")->required()->check(CLI::Range(2, 10000));
    scan->add_option("--out", scan_out, "output file")->required();
    scan->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));

    std::string scenario_path, di_out, method = "dr";
    int max_iterations = DiOptions{}.max_iterations;
    auto* di = app.add_subcommand("di-bound", "device-independent lower bound on the negativity");
    di->add_option("scenario", scenario_path, "scenario file (discenario v1)")->required();
    di->add_option("--out", di_out, "JSON report")->required();
    di->add_option("--method", method, "splitting method: dr or dykstra")->check(CLI::IsMember({"dr", "dykstra"}));
    di->add_option("--max-iterations", max_iterations, "iteration budget per feasibility run")
        ->check(CLI::Range(1, 10000000));

    std::string ms_state, ms_out, ms_ops = "pauli";
    bool no_relations = false;
    auto* ms = app.add_subcommand("make-scenario", "complete scenario from a two-qubit state");
    ms->add_option("state", ms_state, "state file (qstate v1)")->required();
    ms->add_option("--out", ms_out, "scenario file to write")->required();
    ms->add_option("--ops", ms_ops, "pauli or projectors")->check(CLI::IsMember({"pauli", "projectors"}));
    ms->add_flag("--no-relations", no_relations, "omit the structure relations");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        if (const auto* sub = app.get_subcommands().empty() ? nullptr : app.get_subcommands().front()) {
            err << sub->help();
        } else {
            err << app.help();
        }
        return usage;
    }

    try {
        if (*neg) return detail::cmd_negativity(state_path, json_out, out, err);
        if (*scan) return detail::cmd_axi_scan(d, grid_n, scan_out, format, out, err);
        if (*di) return detail::cmd_di_bound(scenario_path, di_out, method, max_iterations, out, err);
        if (*ms) return detail::cmd_make_scenario(ms_state, ms_out, ms_ops, !no_relations, out, err);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return usage;
    }
    return usage;
}

}  // namespace negdim::cli
