#pragma once

// Text exports: trace reports as CSV plus a JSON summary, transition graphs
// as edge lists plus a node table, and a small CSV table type shared by the
// experiment runner.

#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "dynprops.hpp"
#include "verify.hpp"

namespace shadowlab {

/// Rows of already-formatted cells under a fixed header.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add(std::vector<std::string> row) {
        if (row.size() != header.size()) throw std::logic_error("CsvTable: row width does not match header");
        rows.push_back(std::move(row));
    }

    std::size_t column(std::string_view name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        throw std::invalid_argument("CsvTable: no column '" + std::string(name) + "'");
    }

    std::string str() const {
        std::string out;
        auto line = [&](const std::vector<std::string>& cells) {
            for (std::size_t i = 0; i < cells.size(); ++i) {
                if (i) out += ',';
                out += cells[i];
            }
            out += '\n';
        };
        line(header);
        for (const auto& r : rows) line(r);
        return out;
    }

    /// Cells may not contain commas or quotes; that is all the writer emits.
    static CsvTable parse(std::string_view text) {
        CsvTable t;
        std::size_t pos = 0;
        bool first = true;
        while (pos < text.size()) {
            auto end = text.find('\n', pos);
            if (end == std::string_view::npos) end = text.size();
            const auto line = text.substr(pos, end - pos);
            pos = end + 1;
            if (line.empty()) continue;
            std::vector<std::string> cells;
            std::size_t c = 0;
            while (true) {
                const auto comma = line.find(',', c);
                cells.emplace_back(line.substr(c, comma == std::string_view::npos ? line.npos : comma - c));
                if (comma == std::string_view::npos) break;
                c = comma + 1;
            }
            if (first) {
                t.header = std::move(cells);
                first = false;
            } else {
                t.add(std::move(cells));
            }
        }
        return t;
    }
};

inline std::string format_rational(const Rational& r) { return r.str(); }

inline Rational parse_rational(std::string_view s) {
    const auto slash = s.find('/');
    try {
        if (slash == std::string_view::npos) return Rational(std::stoll(std::string(s)), 1);
        return Rational(std::stoll(std::string(s.substr(0, slash))), std::stoll(std::string(s.substr(slash + 1))));
    } catch (const std::logic_error&) {
        throw std::invalid_argument("not a rational: '" + std::string(s) + "'");
    }
}

/// index,error rows.
inline CsvTable trace_csv(const TraceReport& r) {
    CsvTable t{{"index", "error"}, {}};
    for (std::size_t i = 0; i < r.errors.size(); ++i) t.add({std::to_string(i), detail::format_real(r.errors[i])});
    return t;
}

inline nlohmann::ordered_json verdict_json(const Verdict& v) {
    return {{"criterion", std::string(to_string(v.criterion))},
            {"epsilon", v.epsilon},
            {"satisfied", v.satisfied},
            {"statistic", v.statistic},
            {"note", v.satisfied ? "certified at this horizon"
                                 : "not certified; absence of a tracer is not claimed"}};
}

/// Statistics and all four verdicts at ε for one trace.
inline nlohmann::ordered_json trace_summary_json(const TraceReport& r, double epsilon) {
    nlohmann::ordered_json verdicts = nlohmann::ordered_json::array();
    for (auto c : {Criterion::pointwise, Criterion::average, Criterion::mean_ergodic, Criterion::d_lower})
        verdicts.push_back(verdict_json(check(r, c, epsilon)));
    const auto bad = r.bad_profile(epsilon);
    return {{"horizon", r.errors.size()},
            {"tail_fraction", r.tail_fraction.str()},
            {"sup_error", r.sup_error},
            {"cesaro_mean_estimate", r.cesaro_mean_estimate},
            {"bad_set_upper_density", bad.upper_estimate.str()},
            {"good_lower_density", r.good_lower_density(epsilon).str()},
            {"verdicts", verdicts}};
}

/// "u v" per edge, one per line.
template <class P>
void write_edge_list(std::ostream& os, const TransitionGraph<P>& g) {
    for (std::size_t u = 0; u < g.edges.size(); ++u)
        for (auto v : g.edges[u]) os << u << ' ' << v << '\n';
}

/// index,point rows in the system's text format.
template <class P>
CsvTable node_table(const System<P>& s, const TransitionGraph<P>& g) {
    CsvTable t{{"index", "point"}, {}};
    for (std::size_t i = 0; i < g.nodes.size(); ++i) t.add({std::to_string(i), s.format(g.nodes[i])});
    return t;
}

}  // namespace shadowlab
