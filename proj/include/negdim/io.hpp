#pragma once

// Text formats: state files (`qstate v1`), scenario files (`discenario v1`)
// and the deterministic number formatting shared by every writer.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "negdim/di_bound.hpp"
#include "negdim/errors.hpp"
#include "negdim/tensor_core.hpp"

namespace negdim::io {

// 17 significant digits, so parsing the text restores the exact double.
inline std::string fmt(double v) {
    if (v == 0.0) v = 0.0;  // no "-0"
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace detail {

// Lines with comments ('#' to end of line) stripped; blank lines skipped.
struct Line {
    int number;
    std::vector<std::string> tokens;
};

inline std::vector<Line> tokenize(std::istream& in) {
    std::vector<Line> out;
    std::string s;
    for (int n = 1; std::getline(in, s); ++n) {
        if (auto h = s.find('#'); h != std::string::npos) s.erase(h);
        std::istringstream ls(s);
        Line line{n, {}};
        for (std::string t; ls >> t;) line.tokens.push_back(t);
        if (!line.tokens.empty()) out.push_back(std::move(line));
    }
    return out;
}

[[noreturn]] inline void fail(const std::string& what, int line, const std::string& msg) {
    throw ParseError(what + ":" + std::to_string(line) + ": " + msg);
}

inline std::size_t to_index(const std::string& t, const std::string& what, int line) {
    if (t.empty() || t.find_first_not_of("0123456789") != std::string::npos) {
        fail(what, line, "expected a non-negative integer, got '" + t + "'");
    }
    try {
        return std::stoul(t);
    } catch (const std::exception&) {
        fail(what, line, "integer out of range: '" + t + "'");
    }
}

inline double to_real(const std::string& t, const std::string& what, int line) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(t, &used);
    } catch (const std::exception&) {
        fail(what, line, "expected a number, got '" + t + "'");
    }
    if (used != t.size()) fail(what, line, "expected a number, got '" + t + "'");
    if (!std::isfinite(v)) fail(what, line, "non-finite number '" + t + "'");
    return v;
}

inline std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open for reading");
    return in;
}

inline std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error(path + ": cannot open for writing");
    return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// state files

struct StateData {
    std::size_t d_a = 0;
    std::size_t d_b = 0;
    ComplexMatrix rho;
};

// Syntax only. Physical validity is checked by to_state.
inline StateData parse_state(std::istream& in, const std::string& what = "state") {
    const auto lines = detail::tokenize(in);
    if (lines.empty()) throw ParseError(what + ": empty file");
    const auto& head = lines.front();
    if (head.tokens.size() != 4 || head.tokens[0] != "qstate" || head.tokens[1] != "v1") {
        detail::fail(what, head.number, "expected header 'qstate v1 <d_a> <d_b>'");
    }
    StateData s;
    s.d_a = detail::to_index(head.tokens[2], what, head.number);
    s.d_b = detail::to_index(head.tokens[3], what, head.number);
    if (s.d_a == 0 || s.d_b == 0) detail::fail(what, head.number, "local dimensions must be positive");
    if (s.d_a > 64 || s.d_b > 64) detail::fail(what, head.number, "local dimension larger than 64");
    const std::size_t n = s.d_a * s.d_b;
    s.rho = ComplexMatrix(n);
    std::vector<bool> set(n * n, false);
    for (std::size_t li = 1; li < lines.size(); ++li) {
        const auto& l = lines[li];
        if (l.tokens.size() != 4) detail::fail(what, l.number, "expected '<row> <col> <re> <im>'");
        const std::size_t r = detail::to_index(l.tokens[0], what, l.number);
        const std::size_t c = detail::to_index(l.tokens[1], what, l.number);
        if (r >= n || c >= n) {
            detail::fail(what, l.number, "entry (" + std::to_string(r) + ", " + std::to_string(c) +
                                             ") outside a " + std::to_string(n) + "x" + std::to_string(n) + " matrix");
        }
        if (set[r * n + c]) {
            detail::fail(what, l.number, "entry (" + std::to_string(r) + ", " + std::to_string(c) + ") listed twice");
        }
        set[r * n + c] = true;
        s.rho(r, c) = cplx(detail::to_real(l.tokens[2], what, l.number), detail::to_real(l.tokens[3], what, l.number));
    }
    return s;
}

inline StateData read_state_data(const std::string& path) {
    auto in = detail::open_in(path);
    return parse_state(in, path);
}

// Throws the state's own invariant errors (InvalidState, ...).
inline BipartiteState to_state(StateData s) { return {std::move(s.rho), s.d_a, s.d_b}; }

inline BipartiteState read_state(const std::string& path) { return to_state(read_state_data(path)); }

inline void write_state(std::ostream& out, const ComplexMatrix& rho, std::size_t d_a, std::size_t d_b) {
    out << "qstate v1 " << d_a << ' ' << d_b << '\n';
    for (std::size_t r = 0; r < rho.dim(); ++r)
        for (std::size_t c = 0; c < rho.dim(); ++c) {
            const cplx v = rho(r, c);
            if (v != cplx(0.0, 0.0)) out << r << ' ' << c << ' ' << fmt(v.real()) << ' ' << fmt(v.imag()) << '\n';
        }
}

inline void write_state(std::ostream& out, const BipartiteState& s) { write_state(out, s.rho(), s.d_a(), s.d_b()); }

inline void write_state(const std::string& path, const BipartiteState& s) {
    auto out = detail::open_out(path);
    write_state(out, s);
}

// ---------------------------------------------------------------------------
// scenario files
//
//   discenario v1 <m_a> <m_b>
//   <i> <j> <k> <l> <re> <im>             fixed entry chi_{(i,j),(k,l)}
//   rel <i> <j> <k> <l> <re> <im> ...     structure relation sum coeff * chi = 0

inline DiScenario parse_scenario(std::istream& in, const std::string& what = "scenario") {
    const auto lines = detail::tokenize(in);
    if (lines.empty()) throw ParseError(what + ": empty file");
    const auto& head = lines.front();
    if (head.tokens.size() != 4 || head.tokens[0] != "discenario" || head.tokens[1] != "v1") {
        detail::fail(what, head.number, "expected header 'discenario v1 <m_a> <m_b>'");
    }
    DiScenario sc;
    sc.m_a = detail::to_index(head.tokens[2], what, head.number);
    sc.m_b = detail::to_index(head.tokens[3], what, head.number);
    if (sc.m_a > 8 || sc.m_b > 8) detail::fail(what, head.number, "more than 8 operators per party");

    auto check_range = [&](std::size_t i, std::size_t j, std::size_t k, std::size_t l, int line) {
        if (i > sc.m_a || k > sc.m_a || j > sc.m_b || l > sc.m_b) {
            std::ostringstream msg;
            msg << "index (" << i << ',' << j << "),(" << k << ',' << l << ") outside 0.." << sc.m_a << " x 0.."
                << sc.m_b;
            detail::fail(what, line, msg.str());
        }
    };
    for (std::size_t li = 1; li < lines.size(); ++li) {
        const auto& t = lines[li].tokens;
        const int ln = lines[li].number;
        if (t[0] == "rel") {
            if (t.size() < 7 || (t.size() - 1) % 6 != 0) {
                detail::fail(what, ln, "expected 'rel' followed by groups of '<i> <j> <k> <l> <re> <im>'");
            }
            MomentRelation rel;
            for (std::size_t p = 1; p < t.size(); p += 6) {
                MomentTerm term{detail::to_index(t[p], what, ln), detail::to_index(t[p + 1], what, ln),
                                detail::to_index(t[p + 2], what, ln), detail::to_index(t[p + 3], what, ln),
                                cplx(detail::to_real(t[p + 4], what, ln), detail::to_real(t[p + 5], what, ln))};
                check_range(term.i, term.j, term.k, term.l, ln);
                rel.push_back(term);
            }
            sc.relations.push_back(std::move(rel));
            continue;
        }
        if (t.size() != 6) detail::fail(what, ln, "expected '<i> <j> <k> <l> <re> <im>'");
        FixedEntry e{detail::to_index(t[0], what, ln), detail::to_index(t[1], what, ln),
                     detail::to_index(t[2], what, ln), detail::to_index(t[3], what, ln),
                     cplx(detail::to_real(t[4], what, ln), detail::to_real(t[5], what, ln))};
        check_range(e.i, e.j, e.k, e.l, ln);
        sc.constraints.push_back(e);
    }
    try {
        validate(sc);
    } catch (const InvalidScenario& e) {
        throw ParseError(what + ": " + e.what());
    }
    return sc;
}

inline DiScenario read_scenario(const std::string& path) {
    auto in = detail::open_in(path);
    return parse_scenario(in, path);
}

inline void write_scenario(std::ostream& out, const DiScenario& sc) {
    out << "discenario v1 " << sc.m_a << ' ' << sc.m_b << '\n';
    for (const auto& e : sc.constraints) {
        out << e.i << ' ' << e.j << ' ' << e.k << ' ' << e.l << ' ' << fmt(e.value.real()) << ' '
            << fmt(e.value.imag()) << '\n';
    }
    for (const auto& rel : sc.relations) {
        out << "rel";
        for (const auto& t : rel) {
            out << ' ' << t.i << ' ' << t.j << ' ' << t.k << ' ' << t.l << ' ' << fmt(t.coeff.real()) << ' '
                << fmt(t.coeff.imag());
        }
        out << '\n';
    }
}

inline void write_scenario(const std::string& path, const DiScenario& sc) {
    auto out = detail::open_out(path);
    write_scenario(out, sc);
}

// ---------------------------------------------------------------------------
// JSON objects with a fixed key order and fixed number formatting

class JsonObject {
public:
    JsonObject& add(const std::string& key, double v) { return raw(key, std::isfinite(v) ? fmt(v) : "null"); }
    JsonObject& add(const std::string& key, int v) { return raw(key, std::to_string(v)); }
    JsonObject& add(const std::string& key, long v) { return raw(key, std::to_string(v)); }
    JsonObject& add(const std::string& key, bool v) { return raw(key, v ? "true" : "false"); }
    JsonObject& add(const std::string& key, const char* v) { return add(key, std::string(v)); }
    JsonObject& add(const std::string& key, const std::string& v) { return raw(key, quote(v)); }
    JsonObject& null(const std::string& key) { return raw(key, "null"); }

    JsonObject& raw(const std::string& key, const std::string& value) {
        fields_.emplace_back(key, value);
        return *this;
    }

    std::string str() const {
        std::string s = "{";
        for (std::size_t i = 0; i < fields_.size(); ++i) {
            if (i) s += ", ";
            s += quote(fields_[i].first) + ": " + fields_[i].second;
        }
        return s + "}";
    }

    static std::string quote(const std::string& v) {
        std::string s = "\"";
        for (unsigned char ch : v) {
            switch (ch) {
                case '"': s += "\\\""; break;
                case '\\': s += "\\\\"; break;
                case '\n': s += "\\n"; break;
                case '\t': s += "\\t"; break;
                default:
                    if (ch < 0x20) {
                        char buf[8];
                        std::snprintf(buf, sizeof buf, "\\u%04x", ch);
                        s += buf;
                    } else {
                        s += static_cast<char>(ch);
                    }
            }
        }
        return s + "\"";
    }

private:
    std::vector<std::pair<std::string, std::string>> fields_;
};

}  // namespace negdim::io
