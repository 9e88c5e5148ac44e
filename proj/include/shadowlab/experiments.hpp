#pragma once

// Registered experiments: each reproduces one example or proof step,
// emits CSV tables plus a JSON summary, and carries a checker that
// recomputes its pass/fail verdict from the CSV tables alone.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "catalog.hpp"
#include "density.hpp"
#include "dynprops.hpp"
#include "io.hpp"
#include "oracle/doubling_backward.hpp"
#include "pseudo_orbit.hpp"
#include "system.hpp"
#include "verify.hpp"

namespace shadowlab {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kOutDirVariable = "SHADOWLAB_OUT_DIR";

using Json = nlohmann::ordered_json;

/// Bad configuration or unknown names; maps to exit code 2.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Unwritable output; maps to exit code 3.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
    std::string experiment;
    std::string system;
    std::size_t horizon = 1;
    double delta = 1;
    double epsilon = 1;
    double net_resolution = 1;
    std::uint64_t seed = 0;
    Rational tail_fraction = kDefaultTailFraction;
    /// Number of seeded repetitions (orbits, sequences, pairs or grid points).
    std::size_t samples = 1;
    /// Path of the JSON report; CSV tables are written next to it.
    std::string output_path;

    Json to_json() const {
        return {{"experiment", experiment},
                {"system", system},
                {"horizon", horizon},
                {"delta", delta},
                {"epsilon", epsilon},
                {"net_resolution", net_resolution},
                {"seed", seed},
                {"tail_fraction", tail_fraction.str()},
                {"samples", samples},
                {"output_path", output_path}};
    }

    void validate() const {
        if (horizon == 0) throw ConfigError("horizon must be positive");
        if (samples == 0) throw ConfigError("samples must be positive");
        const std::pair<const char*, double> positive[] = {
            {"delta", delta}, {"epsilon", epsilon}, {"net_resolution", net_resolution}};
        for (const auto& [name, v] : positive)
            if (!(v > 0) || !std::isfinite(v)) throw ConfigError(std::string(name) + " must be a positive real");
        if (!(tail_fraction > Rational(0, 1)) || tail_fraction > Rational(1, 1))
            throw ConfigError("tail_fraction must lie in (0, 1]");
    }
};

namespace detail {

inline Rational parse_tail_fraction(const std::string& s) {
    try {
        return parse_rational(s);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("tail_fraction: ") + e.what());
    }
}

}  // namespace detail

/// Overlays the keys present in `j` onto `base`. Unknown keys are errors.
inline ExperimentConfig apply_config_json(ExperimentConfig base, const Json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    try {
        for (const auto& [key, v] : j.items()) {
            if (key == "experiment") base.experiment = v.get<std::string>();
            else if (key == "system") base.system = v.get<std::string>();
            else if (key == "horizon") base.horizon = v.get<std::size_t>();
            else if (key == "delta") base.delta = v.get<double>();
            else if (key == "epsilon") base.epsilon = v.get<double>();
            else if (key == "net_resolution") base.net_resolution = v.get<double>();
            else if (key == "seed") base.seed = v.get<std::uint64_t>();
            else if (key == "tail_fraction") base.tail_fraction = detail::parse_tail_fraction(v.get<std::string>());
            else if (key == "samples") base.samples = v.get<std::size_t>();
            else if (key == "output_path") base.output_path = v.get<std::string>();
            else throw ConfigError("unknown config key '" + key + "'");
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config value has the wrong type: ") + e.what());
    }
    return base;
}

using Tables = std::map<std::string, CsvTable>;

struct ExperimentResult {
    Json results = Json::object();
    Tables tables;
    bool pass = false;
};

struct ExperimentSpec {
    std::string name;
    /// Which result of the source the experiment reproduces.
    std::string citation;
    std::string summary;
    ExperimentConfig defaults;
    std::vector<std::string> systems;
    /// Column documentation, one entry per table.
    std::map<std::string, std::string> columns;
    std::function<ExperimentResult(const ExperimentConfig&)> run;
    std::function<bool(const Tables&, const ExperimentConfig&)> csv_check;
};

// ---------------------------------------------------------------------------
// Helpers shared by the experiments

namespace detail {

inline std::string cell(double v) { return format_real(v); }
inline std::string cell(const Rational& r) { return r.str(); }
inline std::string cell(std::size_t v) { return std::to_string(v); }
inline std::string cell(bool b) { return b ? "1" : "0"; }

inline double num(const std::vector<std::string>& row, std::size_t col) { return parse_real(row.at(col)); }
inline Rational rat(const std::vector<std::string>& row, std::size_t col) { return parse_rational(row.at(col)); }
inline std::size_t count(const std::vector<std::string>& row, std::size_t col) { return std::stoull(row.at(col)); }

inline const CsvTable& table(const Tables& t, const std::string& name) {
    const auto it = t.find(name);
    if (it == t.end()) throw std::invalid_argument("missing table '" + name + "'");
    return it->second;
}

inline std::size_t shift_length(const ExperimentConfig& c) { return c.horizon + 64; }

/// Splits `seed` into per-sample seeds.
inline std::uint64_t sample_seed(std::uint64_t seed, std::size_t i) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (i + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Generic claims table: quantity, value, relation, threshold.
inline CsvTable claims_table() { return CsvTable{{"quantity", "value", "relation", "threshold"}, {}}; }

inline bool relation_holds(double v, const std::string& rel, double thr) {
    if (rel == "lt") return v < thr;
    if (rel == "le") return v <= thr;
    if (rel == "ge") return v >= thr;
    if (rel == "gt") return v > thr;
    if (rel == "eq") return v == thr;
    throw std::invalid_argument("unknown relation '" + rel + "'");
}

inline void claim(CsvTable& t, const std::string& q, double v, const std::string& rel, double thr) {
    t.add({q, cell(v), rel, cell(thr)});
}

inline bool claims_hold(const CsvTable& t) {
    const auto v = t.column("value"), r = t.column("relation"), th = t.column("threshold");
    if (t.rows.empty()) return false;
    for (const auto& row : t.rows)
        if (!relation_holds(num(row, v), row.at(r), num(row, th))) return false;
    return true;
}

inline ExperimentConfig defaults(std::string name, std::string system, std::size_t horizon, double delta,
                                 double epsilon, double net_resolution, std::size_t samples) {
    ExperimentConfig c;
    c.experiment = std::move(name);
    c.system = std::move(system);
    c.horizon = horizon;
    c.delta = delta;
    c.epsilon = epsilon;
    c.net_resolution = net_resolution;
    c.seed = 20240101;
    c.samples = samples;
    return c;
}

inline bool check_two_circle_partition(const Tables& tables, const ExperimentConfig&);
inline bool check_minimal_returns(const Tables& tables, const ExperimentConfig& c);

// ---------------------------------------------------------------------------
// lemma-equivalence

inline ExperimentResult run_lemma_equivalence(const ExperimentConfig& c) {
    const double diam = visit_system(c.system, 64, [](const auto& s) { return s.diameter; });
    const double eps = c.epsilon;
    const double eta = eps / (diam + 1);
    Rng rng(c.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    CsvTable t{{"sequence", "horizon", "diameter", "mean", "bad_count_eps", "eta", "bad_count_eta", "bound",
                "forward_applies", "forward_ok", "converse_ok"},
               {}};
    std::size_t forward_cases = 0, forward_violations = 0, converse_violations = 0;
    std::vector<double> errors(c.horizon);
    for (std::size_t s = 0; s < c.samples; ++s) {
        // Sparse large errors over a small background, with means spread around ε².
        const double spike = 0.04 * unit(rng) / diam;
        const double floor = 2 * eps * eps * unit(rng);
        for (auto& e : errors) {
            const double u = std::ldexp(std::floor(std::ldexp(unit(rng), 20)), -20);
            e = unit(rng) < spike ? u * diam : std::min(u * floor, diam);
        }
        const auto mb = markov_density_bound(errors, eps);
        const double mean = static_cast<double>(mb.mean);
        const double bound = bounded_mean_from_density(errors, eta, diam);
        const std::size_t bad_eta = threshold_set(errors, eta).size();
        const bool applies = mean < eps * eps;
        const bool fwd = !applies || density_at(mb.bad_set, c.horizon).less_than(eps);
        const bool conv = mean <= bound;
        forward_cases += applies;
        forward_violations += !fwd;
        converse_violations += !conv;
        t.add({cell(s), cell(c.horizon), cell(diam), cell(mean), cell(mb.bad_set.size()), cell(eta), cell(bad_eta),
               cell(bound), cell(applies), cell(fwd), cell(conv)});
    }
    ExperimentResult r;
    r.results = {{"sequences", c.samples},
                 {"diameter", diam},
                 {"eta", eta},
                 {"forward_cases", forward_cases},
                 {"forward_violations", forward_violations},
                 {"converse_violations", converse_violations}};
    r.pass = forward_violations == 0 && converse_violations == 0;
    r.tables["sequences"] = std::move(t);
    return r;
}

inline bool check_lemma_equivalence(const Tables& tables, const ExperimentConfig& c) {
    const auto& t = table(tables, "sequences");
    const auto h = t.column("horizon"), d = t.column("diameter"), m = t.column("mean"), be = t.column("bad_count_eps"),
               et = t.column("eta"), bh = t.column("bad_count_eta");
    if (t.rows.size() != c.samples) return false;
    for (const auto& row : t.rows) {
        const double mean = num(row, m), diam = num(row, d), eta = num(row, et);
        const auto n = static_cast<std::int64_t>(count(row, h));
        if (mean < c.epsilon * c.epsilon &&
            !Rational(static_cast<std::int64_t>(count(row, be)), n).less_than(c.epsilon))
            return false;
        const double bound = diam * Rational(static_cast<std::int64_t>(count(row, bh)), n).to_double() + eta;
        if (!(mean <= bound)) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// isometry-no-mes

inline std::size_t blocks_for_horizon(std::size_t horizon) {
    std::size_t n = 1;
    while (2 + 2 * (n + 1) * (n + 2) <= horizon) ++n;
    if (2 + 2 * n * (n + 1) > horizon) throw ConfigError("isometry-no-mes: horizon must be at least 6");
    return n;
}

inline ExperimentResult run_isometry_no_mes(const ExperimentConfig& c) {
    const auto s = make_interval_isometry();
    const std::size_t n_blocks = blocks_for_horizon(c.horizon);
    const auto p = isometry_block_sequence(n_blocks, c.delta);
    CsvTable grid{{"candidate", "z", "mean_error", "bad_upper"}, {}};
    double min_mean = std::numeric_limits<double>::infinity();
    Rational min_bad(1, 1);
    for (std::size_t k = 0; k < c.samples; ++k) {
        const double z = c.samples == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(c.samples - 1);
        const auto rep = trace(s, z, p, c.tail_fraction);
        const double mean = static_cast<double>(mean_of(rep.errors));
        const auto bad = rep.bad_profile(c.epsilon).upper_estimate;
        min_mean = std::min(min_mean, mean);
        min_bad = std::min(min_bad, bad);
        grid.add({cell(k), cell(z), cell(mean), cell(bad)});
    }
    CsvTable breaks{{"index"}, {}};
    for (auto i : p.break_set.members()) breaks.add({cell(i)});
    const double bound = 1.0 / 3.0 - 0.02;
    ExperimentResult r;
    r.results = {{"blocks", n_blocks},
                 {"sequence_length", p.horizon()},
                 {"break_count", p.break_set.size()},
                 {"break_density", density_at(p.break_set, p.horizon()).str()},
                 {"grid_points", c.samples},
                 {"min_mean_error", min_mean},
                 {"mean_error_bound", bound},
                 {"min_bad_upper_density", min_bad.str()},
                 {"note", "grid search is one-sided; the bound is measured on this grid"}};
    r.pass = min_mean >= bound && !min_bad.less_than(c.epsilon);
    r.tables["grid"] = std::move(grid);
    r.tables["breaks"] = std::move(breaks);
    return r;
}

inline bool check_isometry_no_mes(const Tables& tables, const ExperimentConfig& c) {
    const auto& g = table(tables, "grid");
    const auto m = g.column("mean_error"), b = g.column("bad_upper");
    if (g.rows.size() != c.samples) return false;
    for (const auto& row : g.rows)
        if (!(num(row, m) >= 1.0 / 3.0 - 0.02) || rat(row, b).less_than(c.epsilon)) return false;
    return true;
}

// ---------------------------------------------------------------------------
// constant-map-mes

inline ExperimentResult run_constant_map_mes(const ExperimentConfig& c) {
    const auto s = make_constant_map();
    const auto p = ergodic_pseudo_orbit<double>(s, {}, c.delta, doubling_schedule(), c.horizon, c.seed);
    SearchOptions<double> opts;
    opts.tail_fraction = c.tail_fraction;
    const auto v = search_tracer(s, p, c.epsilon, Criterion::mean_ergodic, c.net_resolution, opts);
    const auto rep = trace(s, *v.witness, p, c.tail_fraction);
    CsvTable t{{"index", "point", "error", "junction"}, {}};
    for (std::size_t i = 0; i < p.horizon(); ++i)
        t.add({cell(i), cell(p.points[i]), cell(rep.errors[i]), cell(p.junctions.contains(i))});
    ExperimentResult r;
    r.results = {{"witness", *v.witness},
                 {"candidates", v.candidates_evaluated},
                 {"junctions", p.junctions.size()},
                 {"break_density", density_at(p.break_set, p.horizon()).str()},
                 {"bad_upper_density", rep.bad_profile(c.epsilon).upper_estimate.str()},
                 {"verdict", verdict_json(v)}};
    r.pass = v.satisfied;
    r.tables["trace"] = std::move(t);
    return r;
}

/// Recounts {i : error ≥ ε} from an index,error table.
inline bool bad_upper_below(const CsvTable& t, const ExperimentConfig& c, double threshold) {
    const auto e = t.column("error");
    std::vector<double> errors;
    for (const auto& row : t.rows) errors.push_back(num(row, e));
    if (errors.empty()) return false;
    return density_profile(threshold_set(errors, c.epsilon), c.tail_fraction).upper_estimate.less_than(threshold);
}

inline bool check_constant_map_mes(const Tables& tables, const ExperimentConfig& c) {
    const auto& t = table(tables, "trace");
    return t.rows.size() == c.horizon && bad_upper_below(t, c, c.epsilon);
}

// ---------------------------------------------------------------------------
// two-circles

inline ExperimentResult run_two_circles(const ExperimentConfig& c) {
    const auto s = make_two_circles_swap_double();
    CsvTable t{{"power", "node", "circle", "scc"}, {}};
    ExperimentResult r;
    std::size_t scc2 = 0, scc1 = 0, crossing2 = 0;
    for (unsigned k : {1u, 2u}) {
        const auto g = build_transition_graph(make_power(s, k), c.delta, c.net_resolution);
        const auto comp = strongly_connected_components(g.edges);
        for (std::size_t u = 0; u < g.nodes.size(); ++u) {
            t.add({cell(std::size_t{k}), cell(u), cell(static_cast<std::size_t>(g.nodes[u].component)),
                   cell(static_cast<std::size_t>(comp.component[u]))});
            if (k == 2)
                for (auto v : g.edges[u]) crossing2 += g.nodes[u].component != g.nodes[v].component;
        }
        (k == 1 ? scc1 : scc2) = comp.count;
        r.results["power_" + std::to_string(k)] = {{"nodes", g.nodes.size()},
                                                   {"edges", g.edge_count()},
                                                   {"scc_count", comp.count},
                                                   {"chain_transitive", comp.count == 1}};
    }
    r.results["cross_circle_edges_power_2"] = crossing2;
    r.tables["nodes"] = std::move(t);
    r.pass = scc1 == 1 && scc2 == 2 && crossing2 == 0 && check_two_circle_partition(r.tables, c);
    return r;
}

inline bool check_two_circle_partition(const Tables& tables, const ExperimentConfig&) {
    const auto& t = table(tables, "nodes");
    const auto pw = t.column("power"), circ = t.column("circle"), sc = t.column("scc");
    std::map<std::size_t, std::map<std::size_t, std::set<std::size_t>>> circles_of_scc;
    for (const auto& row : t.rows) circles_of_scc[count(row, pw)][count(row, sc)].insert(count(row, circ));
    if (circles_of_scc[1].size() != 1) return false;
    const auto& two = circles_of_scc[2];
    if (two.size() != 2) return false;
    std::set<std::size_t> seen;
    for (const auto& [id, circles] : two) {
        if (circles.size() != 1) return false;
        seen.insert(*circles.begin());
    }
    return seen.size() == 2;
}

// ---------------------------------------------------------------------------
// doubling-mes

inline ExperimentResult run_doubling_mes(const ExperimentConfig& c) {
    const auto s = make_doubling_circle();
    CsvTable t{{"sample", "seed", "break_count", "witness_index", "from_hint", "bad_count", "bad_upper",
                "satisfied"},
               {}};
    std::size_t passed = 0, from_hint = 0;
    for (std::size_t k = 0; k < c.samples; ++k) {
        const auto seed = sample_seed(c.seed, k);
        const auto p = ergodic_pseudo_orbit<BinaryAngle>(s, {}, c.delta, doubling_schedule(), c.horizon, seed);
        SearchOptions<BinaryAngle> opts;
        opts.hints = {oracle::doubling_backward_tracer(p)};
        opts.tail_fraction = c.tail_fraction;
        const auto v = search_tracer(s, p, c.epsilon, Criterion::mean_ergodic, c.net_resolution, opts);
        const auto bad = v.evidence.bad_set(c.epsilon);
        const auto upper = density_profile(bad, c.tail_fraction).upper_estimate;
        const bool hint = v.witness_index >= v.net_size;
        passed += v.satisfied;
        from_hint += hint;
        t.add({cell(k), std::to_string(seed), cell(p.break_set.size()), cell(v.witness_index), cell(hint),
               cell(bad.size()), cell(upper), cell(v.satisfied)});
    }
    ExperimentResult r;
    r.results = {{"orbits", c.samples},
                 {"satisfied", passed},
                 {"witness_from_oracle_hint", from_hint},
                 {"net_size", s.net_size(c.net_resolution)}};
    r.pass = passed == c.samples;
    r.tables["orbits"] = std::move(t);
    return r;
}

/// Every row's bad_upper is below `threshold(row)`.
inline bool all_rows_below(const CsvTable& t, std::size_t expected_rows,
                           const std::function<double(const std::vector<std::string>&)>& threshold) {
    const auto b = t.column("bad_upper");
    if (t.rows.size() != expected_rows) return false;
    for (const auto& row : t.rows)
        if (!rat(row, b).less_than(threshold(row))) return false;
    return true;
}

inline bool check_doubling_mes(const Tables& tables, const ExperimentConfig& c) {
    return all_rows_below(table(tables, "orbits"), c.samples, [&](const auto&) { return c.epsilon; });
}

// ---------------------------------------------------------------------------
// shift-mes

inline ExperimentResult run_shift_mes(const ExperimentConfig& c) {
    const auto s = make_full_shift(2, shift_length(c));
    const std::size_t depth = cylinder_depth(c.delta);
    CsvTable t{{"sample", "seed", "break_upper", "epsilon_used", "bad_count", "bad_upper", "satisfied"}, {}};
    std::size_t passed = 0;
    for (std::size_t k = 0; k < c.samples; ++k) {
        const auto seed = sample_seed(c.seed, k);
        const auto p = ergodic_pseudo_orbit<SymbolPoint>(s, {}, c.delta, doubling_schedule(), c.horizon, seed);
        const auto z = shift_constructive_tracer(p, depth);
        const auto break_upper = density_profile(p.break_set, c.tail_fraction).upper_estimate;
        const double eps = c.epsilon + break_upper.to_double();
        const auto rep = trace(s, z, p, c.tail_fraction);
        const auto v = check_mean_ergodic(rep, eps);
        passed += v.satisfied;
        t.add({cell(k), std::to_string(seed), cell(break_upper), cell(eps), cell(rep.bad_set(eps).size()),
               cell(rep.bad_profile(eps).upper_estimate), cell(v.satisfied)});
    }
    ExperimentResult r;
    r.results = {{"orbits", c.samples},
                 {"satisfied", passed},
                 {"prefix_depth", depth},
                 {"working_length", shift_length(c)}};
    r.pass = passed == c.samples;
    r.tables["orbits"] = std::move(t);
    return r;
}

inline bool check_shift_mes(const Tables& tables, const ExperimentConfig& c) {
    const auto& t = table(tables, "orbits");
    const auto bu = t.column("break_upper");
    return all_rows_below(t, c.samples, [&](const auto& row) { return c.epsilon + rat(row, bu).to_double(); });
}

// ---------------------------------------------------------------------------
// cantor-identity

inline ExperimentResult run_cantor_identity(const ExperimentConfig& c) {
    const auto s = make_cantor_identity(shift_length(c));
    Rng rng(c.seed);
    CsvTable t = claims_table();
    ExperimentResult r;

    // Shadowing: a δ-pseudo orbit of the identity stays in one cylinder, so x_0 traces it.
    const auto start = s.sample(rng);
    const auto pseudo = perturbed_orbit(s, start, c.delta, c.horizon, sample_seed(c.seed, 1));
    const auto pw = check_pointwise(trace(s, start, pseudo, c.tail_fraction), c.epsilon);
    claim(t, "pointwise_sup_error", pw.statistic, "lt", c.epsilon);

    // Not transitive: some pair of balls is never connected.
    const auto tr = is_transitive_sampled(s, c.epsilon, 64, 20, sample_seed(c.seed, 2));
    claim(t, "transitive_sampled", tr.transitive ? 1.0 : 0.0, "eq", 0.0);

    // Not chain transitive at δ = ε: one component per ε-cylinder.
    const double res = std::ldexp(1.0, -static_cast<int>(cylinder_depth(c.epsilon) + 2));
    const auto g = build_transition_graph(s, c.epsilon, res);
    const auto comps = strongly_connected_components(g.edges).count;
    claim(t, "scc_count", static_cast<double>(comps), "ge", 2.0);

    // No mean ergodic shadowing: chains alternate between the cylinders of 0^∞ and 1^∞.
    const std::size_t L = shift_length(c);
    std::vector<SymbolPoint> starts;
    for (std::size_t j = 0; j < 64; ++j) starts.push_back(SymbolPoint::constant(j % 2 ? 1 : 0, 2, L));
    const auto p = ergodic_pseudo_orbit(s, starts, c.delta, doubling_schedule(), c.horizon, sample_seed(c.seed, 3));
    SearchOptions<SymbolPoint> opts;
    opts.tail_fraction = c.tail_fraction;
    const auto v = search_tracer(s, p, c.epsilon, Criterion::mean_ergodic, c.net_resolution, opts);
    claim(t, "best_bad_upper_density", v.statistic, "ge", c.epsilon);

    r.results = {{"pointwise", verdict_json(pw)},
                 {"transitive_sampled", tr.transitive},
                 {"failing_pair",
                  tr.failing_pair ? Json::array({s.format(tr.failing_pair->first).substr(0, 16),
                                                 s.format(tr.failing_pair->second).substr(0, 16)})
                                  : Json()},
                 {"graph_nodes", g.nodes.size()},
                 {"scc_count", comps},
                 {"mean_ergodic_search", verdict_json(v)},
                 {"candidates", v.candidates_evaluated}};
    r.pass = claims_hold(t);
    r.tables["claims"] = std::move(t);
    return r;
}

inline bool check_claims(const Tables& tables, const ExperimentConfig&) {
    return claims_hold(table(tables, "claims"));
}

// ---------------------------------------------------------------------------
// power-interleave

inline ExperimentResult run_power_interleave(const ExperimentConfig& c) {
    Rng rng(c.seed);
    std::uniform_int_distribution<std::uint64_t> term(0, 1'000'000);
    CsvTable seqs{{"sample", "k", "n", "sampled_sum", "full_sum"}, {}};
    std::size_t violations = 0;
    std::vector<std::uint64_t> a(c.horizon);
    for (std::size_t s = 0; s < c.samples; ++s) {
        for (auto& x : a) x = term(rng);
        for (std::size_t k : {2u, 3u, 5u}) {
            const auto ps = power_sampling<std::uint64_t>(a, k);
            violations += !ps.holds();
            seqs.add({cell(s), cell(k), cell(ps.n), std::to_string(ps.sampled), std::to_string(ps.full)});
        }
    }

    // The interleaving construction on the doubling circle.
    const auto f = make_doubling_circle();
    CsvTable inter{{"k", "base_horizon", "base_breaks", "out_breaks", "breaks_at_scaled_indices", "exact_match"}, {}};
    bool interleave_ok = true;
    for (unsigned k : {2u, 3u, 5u}) {
        const auto g = make_power(f, k);
        const std::size_t h = std::max<std::size_t>(c.horizon / k, 2);
        const auto base = ergodic_pseudo_orbit<BinaryAngle>(g, {}, c.delta, doubling_schedule(), h,
                                                            sample_seed(c.seed, k));
        const auto out = interleave_for_power(f, base, k);
        bool scaled = out.break_set.size() == base.break_set.size();
        for (auto i : base.break_set.members()) scaled = scaled && out.break_set.contains(k * i + k - 1);
        // An exact orbit of f^k interleaves into the exact orbit of f.
        const auto x0 = BinaryAngle::from_fraction(1, 3 + 2 * k, k * h + 64);
        PseudoOrbit<BinaryAngle> exact;
        exact.system_name = g.name;
        exact.delta = c.delta;
        exact.points = g.orbit(x0, h);
        exact.break_set = compute_break_set(g, exact.points, c.delta);
        exact.junctions = IndexSet(h);
        const auto y = interleave_for_power(f, exact, k);
        const auto direct = f.orbit(x0, k * h);
        const bool match = y.points == direct;
        interleave_ok = interleave_ok && scaled && match;
        inter.add({cell(std::size_t{k}), cell(h), cell(base.break_set.size()), cell(out.break_set.size()), cell(scaled),
                   cell(match)});
    }
    ExperimentResult r;
    r.results = {{"sequences", c.samples},
                 {"powers", Json::array({2, 3, 5})},
                 {"inequality_violations", violations},
                 {"interleave_ok", interleave_ok}};
    r.pass = violations == 0 && interleave_ok;
    r.tables["sequences"] = std::move(seqs);
    r.tables["interleave"] = std::move(inter);
    return r;
}

inline bool check_power_interleave(const Tables& tables, const ExperimentConfig& c) {
    const auto& s = table(tables, "sequences");
    const auto sa = s.column("sampled_sum"), fu = s.column("full_sum");
    if (s.rows.size() != 3 * c.samples) return false;
    for (const auto& row : s.rows)
        if (!(std::stoull(row.at(sa)) <= std::stoull(row.at(fu)))) return false;
    const auto& t = table(tables, "interleave");
    const auto bb = t.column("base_breaks"), ob = t.column("out_breaks"), sc = t.column("breaks_at_scaled_indices"),
               em = t.column("exact_match");
    if (t.rows.size() != 3) return false;
    for (const auto& row : t.rows)
        if (row.at(bb) != row.at(ob) || row.at(sc) != "1" || row.at(em) != "1") return false;
    return true;
}

// ---------------------------------------------------------------------------
// product-mes

inline ExperimentResult run_product_mes(const ExperimentConfig& c) {
    const auto circle = make_doubling_circle();
    const auto shift = make_full_shift(2, shift_length(c));
    const auto prod = make_product(circle, shift);
    const double shift_delta = std::ldexp(1.0, -6);
    const double half = c.epsilon / 2;
    CsvTable t{{"case", "circle_bad", "shift_bad", "product_bad", "circle_upper", "shift_upper", "union_upper",
                "product_upper", "satisfied"},
               {}};
    std::size_t passed = 0;
    for (std::size_t k = 0; k < c.samples; ++k) {
        const auto a = ergodic_pseudo_orbit<BinaryAngle>(circle, {}, c.delta, doubling_schedule(), c.horizon,
                                                         sample_seed(c.seed, 2 * k));
        const auto b = ergodic_pseudo_orbit<SymbolPoint>(shift, {}, shift_delta, doubling_schedule(), c.horizon,
                                                         sample_seed(c.seed, 2 * k + 1));
        const auto za = oracle::doubling_backward_tracer(a);
        const auto zb = shift_constructive_tracer(b, cylinder_depth(shift_delta));
        const auto ra = trace(circle, za, a, c.tail_fraction);
        const auto rb = trace(shift, zb, b, c.tail_fraction);

        PseudoOrbit<std::pair<BinaryAngle, SymbolPoint>> p;
        p.system_name = prod.name;
        p.delta = std::max(c.delta, shift_delta);
        p.kind = OrbitKind::delta_ergodic;
        for (std::size_t i = 0; i < c.horizon; ++i) p.points.emplace_back(a.points[i], b.points[i]);
        p.break_set = compute_break_set(prod, p.points, p.delta);
        p.junctions = set_union(a.junctions, b.junctions);
        const auto rp = trace(prod, std::pair{za, zb}, p, c.tail_fraction);
        const auto v = check_mean_ergodic(rp, c.epsilon);

        const auto bad_a = ra.bad_set(half), bad_b = rb.bad_set(half), bad_p = rp.bad_set(c.epsilon);
        const auto ua = density_profile(bad_a, c.tail_fraction).upper_estimate;
        const auto ub = density_profile(bad_b, c.tail_fraction).upper_estimate;
        const auto uu = density_profile(set_union(bad_a, bad_b), c.tail_fraction).upper_estimate;
        const auto up = density_profile(bad_p, c.tail_fraction).upper_estimate;
        passed += v.satisfied && ua.less_than(half) && ub.less_than(half);
        t.add({cell(k), cell(bad_a.size()), cell(bad_b.size()), cell(bad_p.size()), cell(ua), cell(ub), cell(uu),
               cell(up), cell(v.satisfied)});
    }
    ExperimentResult r;
    r.results = {{"cases", c.samples}, {"satisfied", passed}, {"component_epsilon", half}, {"shift_delta", shift_delta}};
    r.pass = passed == c.samples;
    r.tables["cases"] = std::move(t);
    return r;
}

inline bool check_product_mes(const Tables& tables, const ExperimentConfig& c) {
    const auto& t = table(tables, "cases");
    const auto ca = t.column("circle_bad"), sb = t.column("shift_bad"), pb = t.column("product_bad"),
               cu = t.column("circle_upper"), su = t.column("shift_upper"), uu = t.column("union_upper"),
               pu = t.column("product_upper");
    if (t.rows.size() != c.samples) return false;
    const double half = c.epsilon / 2;
    for (const auto& row : t.rows) {
        const auto a = rat(row, cu), b = rat(row, su), u = rat(row, uu), p = rat(row, pu);
        if (!a.less_than(half) || !b.less_than(half)) return false;
        if (count(row, pb) > count(row, ca) + count(row, sb)) return false;
        if (p > u || u > a + b || !p.less_than(c.epsilon)) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// proximality

inline ExperimentResult run_proximality(const ExperimentConfig& c) {
    const std::size_t L = shift_length(c);
    const auto s = make_full_shift(2, L);
    const auto x = SymbolPoint::constant(0, 2, L), y = SymbolPoint::constant(1, 2, L);
    const auto out = proximality_experiment(s, x, y, c.epsilon, c.horizon, shift_tracer(s, cylinder_depth(c.delta)),
                                            doubling_schedule(), c.delta);
    CsvTable pairs{{"pair", "liminf", "limsup", "tolerance", "kind"}, {}};
    for (const auto& [name, pc] : {std::pair{"z-x", out.z_x}, std::pair{"z-y", out.z_y}})
        if (pc)
            pairs.add({name, cell(pc->liminf_distance), cell(pc->limsup_distance), cell(pc->tolerance),
                       std::string(to_string(pc->kind))});
    CsvTable tracer{{"statistic", "epsilon", "satisfied"}, {}};
    tracer.add({cell(out.verdict.statistic), cell(c.epsilon), cell(out.verdict.satisfied)});
    const auto m1 = density_profile(out.sequence.m1, c.tail_fraction);
    const auto m2 = density_profile(out.sequence.m2, c.tail_fraction);
    ExperimentResult r;
    r.results = {{"success", out.success},
                 {"failure_reason", out.failure_reason},
                 {"blocks", out.sequence.block_lengths.size()},
                 {"m1_upper_density", m1.upper_estimate.str()},
                 {"m2_upper_density", m2.upper_estimate.str()},
                 {"witness_prefix", out.verdict.witness ? out.verdict.witness->to_text().substr(0, 64) : ""},
                 {"tracer", verdict_json(out.verdict)}};
    r.pass = out.success;
    r.tables["pairs"] = std::move(pairs);
    r.tables["tracer"] = std::move(tracer);
    return r;
}

inline bool check_proximality(const Tables& tables, const ExperimentConfig& c) {
    const auto& tr = table(tables, "tracer");
    if (tr.rows.size() != 1 || !(num(tr.rows[0], tr.column("statistic")) < c.epsilon)) return false;
    const auto& p = table(tables, "pairs");
    if (p.rows.size() != 2) return false;
    for (const auto& row : p.rows)
        if (!(num(row, p.column("liminf")) < c.epsilon)) return false;
    return true;
}

// ---------------------------------------------------------------------------
// minimal-returns

inline constexpr unsigned kReturnsPower = 3;
inline constexpr std::size_t kReturnsGapBound = 8;

inline ExperimentResult run_minimal_returns(const ExperimentConfig& c) {
    const auto f = make_doubling_circle();
    const auto g = make_power(f, kReturnsPower);
    if (c.samples >= c.horizon) throw ConfigError("minimal-returns: samples must be below horizon");
    // 2π/7 has period 3 under doubling, so it is fixed by g.
    const auto z = BinaryAngle::from_fraction(1, 7, kReturnsPower * c.horizon + 128);
    // Periodic δ-pseudo orbit of g: independent small perturbations of z,
    // each step error below 8·δ/16 + δ/16 < δ.
    Rng rng(c.seed);
    PseudoOrbit<BinaryAngle> base;
    base.system_name = g.name;
    base.delta = c.delta;
    base.seed = c.seed;
    base.kind = OrbitKind::delta_pseudo;
    base.points.push_back(z);
    for (std::size_t n = 1; n < c.horizon; ++n) base.points.push_back(f.perturb(z, c.delta / 16, rng));
    base.break_set = compute_break_set(g, base.points, c.delta);
    base.junctions = IndexSet(c.horizon);
    if (!base.break_set.empty()) throw std::logic_error("minimal-returns: periodic pseudo orbit has a break");
    const auto w = oracle::doubling_backward_tracer(interleave_for_power(f, base, kReturnsPower));
    const auto shadow = check_pointwise(trace(g, w, base, c.tail_fraction), c.epsilon / 2);

    // Stand-in for a minimal point in the g-orbit closure of w.
    std::vector<BinaryAngle> candidates;
    BinaryAngle q = w;
    for (std::size_t n = 0; n < c.samples; ++n, q = g.map(q)) candidates.push_back(q);
    const std::size_t horizon = c.horizon - c.samples;
    const auto [best, gap] = most_recurrent_point(g, candidates, c.epsilon, horizon);
    const auto& p = candidates[best];

    CsvTable t{{"n", "distance_to_p", "distance_to_z", "returned"}, {}};
    BinaryAngle pn = p;
    for (std::size_t n = 1; n <= horizon; ++n) {
        pn = g.map(pn);
        const double dp = f.metric(pn, p);
        t.add({cell(n), cell(dp), cell(f.metric(pn, z)), cell(dp < c.epsilon)});
    }
    const auto returns = syndetic_return_times(g, p, c.epsilon, horizon);
    ExperimentResult r;
    r.results = {{"power", kReturnsPower},
                 {"shadow_sup_error", shadow.statistic},
                 {"shadow_pointwise", shadow.satisfied},
                 {"candidate_index", best},
                 {"max_gap", gap},
                 {"gap_bound", kReturnsGapBound},
                 {"return_count", returns.size()},
                 {"note", "Zorn's-lemma minimal point replaced by the candidate with the smallest return gap"}};
    r.tables["returns"] = std::move(t);
    r.pass = shadow.satisfied && check_minimal_returns(r.tables, c);
    return r;
}

inline bool check_minimal_returns(const Tables& tables, const ExperimentConfig& c) {
    const auto& t = table(tables, "returns");
    const auto nn = t.column("n"), dp = t.column("distance_to_p"), dz = t.column("distance_to_z");
    if (t.rows.empty()) return false;
    std::vector<std::size_t> hits;
    for (const auto& row : t.rows) {
        if (num(row, dp) < c.epsilon) hits.push_back(count(row, nn));
        if (!(num(row, dz) <= c.epsilon / 2)) return false;
    }
    return is_syndetic(IndexSet(t.rows.size() + 1, std::move(hits)), kReturnsGapBound);
}

// ---------------------------------------------------------------------------
// isometry-distal

inline ExperimentResult run_isometry_distal(const ExperimentConfig& c) {
    const auto s = make_interval_isometry();
    Rng rng(c.seed);
    CsvTable t{{"sample", "x", "y", "d0", "min_distance", "max_distance", "tolerance", "kind"}, {}};
    std::size_t distal = 0, constant = 0;
    for (std::size_t k = 0; k < c.samples; ++k) {
        double x = s.sample(rng), y = s.sample(rng);
        while (x == y) y = s.sample(rng);
        const double d0 = s.metric(x, y);
        double lo = d0, hi = d0, fx = x, fy = y;
        for (std::size_t n = 0; n <= c.horizon; ++n) {
            const double d = s.metric(fx, fy);
            lo = std::min(lo, d);
            hi = std::max(hi, d);
            fx = s.map(fx);
            fy = s.map(fy);
        }
        const double tol = d0 / 2;
        const auto pc = classify_pair(s, x, y, c.horizon, tol, c.tail_fraction);
        distal += pc.kind == PairKind::distal_at_resolution;
        constant += lo == d0 && hi == d0;
        t.add({cell(k), cell(x), cell(y), cell(d0), cell(lo), cell(hi), cell(tol), std::string(to_string(pc.kind))});
    }
    const double worst = equicontinuity_probe(s, c.delta, c.horizon, c.samples, sample_seed(c.seed, 1));
    ExperimentResult r;
    r.results = {{"pairs", c.samples},
                 {"distal_at_resolution", distal},
                 {"constant_distance", constant},
                 {"equicontinuity_worst_distance", worst},
                 {"equicontinuity_delta", c.delta}};
    r.pass = distal == c.samples && constant == c.samples && worst < c.delta;
    r.tables["pairs"] = std::move(t);
    return r;
}

inline bool check_isometry_distal(const Tables& tables, const ExperimentConfig& c) {
    const auto& t = table(tables, "pairs");
    const auto d0 = t.column("d0"), lo = t.column("min_distance"), hi = t.column("max_distance"),
               tol = t.column("tolerance"), kind = t.column("kind");
    if (t.rows.size() != c.samples) return false;
    for (const auto& row : t.rows) {
        const double d = num(row, d0);
        if (num(row, lo) != d || num(row, hi) != d || !(num(row, tol) < d)) return false;
        if (row.at(kind) != "distal_at_resolution") return false;
    }
    return true;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Registry

inline const std::vector<ExperimentSpec>& experiment_registry() {
    using namespace detail;
    static const std::vector<ExperimentSpec> registry = [] {
        const double pi = std::numbers::pi;
        std::vector<ExperimentSpec> r;
        r.push_back({"lemma-equivalence",
                     "Lemma: average tracing within ε² forces upper density below ε, and conversely",
                     "Markov bound and converse bound on random error sequences, exact counts",
                     defaults("lemma-equivalence", "interval-isometry", 1000, 0.1, 0.1, 0.1, 10000),
                     {"interval-isometry", "doubling-circle", "two-circles"},
                     {{"sequences",
                       "sequence, horizon, diameter, mean, bad_count_eps (#err ≥ ε), eta, bad_count_eta (#err ≥ η), "
                       "bound (diam·density + η), forward_applies (mean < ε²), forward_ok, converse_ok"}},
                     run_lemma_equivalence, check_lemma_equivalence});
        r.push_back({"isometry-no-mes",
                     "Example: f(x) = 1 - x cannot have mean ergodic shadowing",
                     "Grid search over tracers of the block sequence a_0 ∨ ... ∨ a_n",
                     defaults("isometry-no-mes", "interval-isometry", 146, 0.5, 0.3, 1e-4, 10000),
                     {"interval-isometry"},
                     {{"grid", "candidate, z, mean_error (full-horizon mean), bad_upper (upper estimate of {err ≥ ε})"},
                      {"breaks", "index of each recomputed break"}},
                     run_isometry_no_mes, check_isometry_no_mes});
        r.push_back({"constant-map-mes",
                     "Example: the constant map has mean ergodic shadowing",
                     "A δ-ergodic pseudo orbit traced by the fixed point",
                     defaults("constant-map-mes", "constant-interval", 4096, 0.05, 0.1, 0.1, 1),
                     {"constant-interval"},
                     {{"trace", "index, point, error (witness trace error), junction (1 at chain ends)"}},
                     run_constant_map_mes, check_constant_map_mes});
        r.push_back({"two-circles",
                     "Example: on two circles, f^2 is not chain transitive",
                     "Transition graphs of f and f^2 and their strongly connected components",
                     defaults("two-circles", "two-circles", 1, 0.5, 0.5, 0.05, 1),
                     {"two-circles"},
                     {{"nodes", "power, node, circle (1 or 2), scc (component id)"}},
                     run_two_circles, check_two_circle_partition});
        r.push_back({"doubling-mes",
                     "Example: the doubling map has mean ergodic shadowing",
                     "Net search with a backward-iteration hint on seeded δ-ergodic pseudo orbits",
                     defaults("doubling-mes", "doubling-circle", 4096, 0.01 * pi, 0.05, std::ldexp(2 * pi, -12), 100),
                     {"doubling-circle"},
                     {{"orbits",
                       "sample, seed, break_count, witness_index, from_hint, bad_count, bad_upper (upper estimate of "
                       "{err ≥ ε}), satisfied"}},
                     run_doubling_mes, check_doubling_mes});
        r.push_back({"shift-mes",
                     "Example: the full shift has mean ergodic shadowing",
                     "Diagonal tracer on seeded δ-ergodic pseudo orbits of the 2-symbol shift",
                     defaults("shift-mes", "full-shift-2", 4096, std::ldexp(1.0, -6), std::ldexp(1.0, -5),
                              std::ldexp(1.0, -6), 100),
                     {"full-shift-2"},
                     {{"orbits",
                       "sample, seed, break_upper (break set upper estimate), epsilon_used (ε + break_upper), "
                       "bad_count, bad_upper, satisfied"}},
                     run_shift_mes, check_shift_mes});
        r.push_back({"cantor-identity",
                     "Example: the identity on the Cantor set has shadowing but is not transitive",
                     "Shadowing, transitivity, chain components and a failed mean ergodic search",
                     defaults("cantor-identity", "cantor-identity", 4096, std::ldexp(1.0, -6), 0.25,
                              std::ldexp(1.0, -6), 1),
                     {"cantor-identity"},
                     {{"claims", "quantity, value, relation (lt, le, eq, ge, gt), threshold"}},
                     run_cantor_identity, check_claims});
        r.push_back({"power-interleave",
                     "Theorem: powers inherit mean ergodic shadowing (interleaving step)",
                     "Sampling inequality on integer sequences and the orbit interleaving construction",
                     defaults("power-interleave", "doubling-circle", 1000, 0.01 * pi, 0.05, 0.05, 1000),
                     {"doubling-circle"},
                     {{"sequences", "sample, k, n (⌊len/k⌋), sampled_sum (Σ a_ik), full_sum (Σ_{l<nk} a_l)"},
                      {"interleave",
                       "k, base_horizon, base_breaks, out_breaks, breaks_at_scaled_indices, exact_match"}},
                     run_power_interleave, check_power_interleave});
        r.push_back({"product-mes",
                     "Theorem: products inherit mean ergodic shadowing",
                     "Componentwise tracers at ε/2 checked on the max-metric product at ε",
                     defaults("product-mes", "doubling-circle*full-shift-2", 2048, 0.01 * pi, 0.1, 0.1, 100),
                     {"doubling-circle*full-shift-2"},
                     {{"cases",
                       "case, circle_bad and shift_bad (counts at ε/2), product_bad (count at ε), circle_upper, "
                       "shift_upper, union_upper, product_upper, satisfied"}},
                     run_product_mes, check_product_mes});
        r.push_back({"proximality",
                     "Theorem: mean ergodic shadowing yields a point proximal to two given orbits",
                     "Witness sequence alternating the orbits of 0^∞ and 1^∞, traced and classified",
                     defaults("proximality", "full-shift-2", 4096, std::ldexp(1.0, -6), std::ldexp(1.0, -5),
                              std::ldexp(1.0, -6), 1),
                     {"full-shift-2"},
                     {{"pairs", "pair, liminf, limsup, tolerance, kind"}, {"tracer", "statistic, epsilon, satisfied"}},
                     run_proximality, check_proximality});
        r.push_back({"minimal-returns",
                     "Theorem: minimal systems with shadowing lack mean ergodic shadowing (constructive part)",
                     "Shadowed periodic pseudo orbit of f^3 and syndetic returns of a most recurrent point",
                     defaults("minimal-returns", "doubling-circle", 512, 0.01, 0.1, 0.1, 64),
                     {"doubling-circle"},
                     {{"returns", "n, distance_to_p, distance_to_z (z = 2π/7), returned (distance_to_p < ε)"}},
                     run_minimal_returns, check_minimal_returns});
        r.push_back({"isometry-distal",
                     "Corollary: isometries are distal, so they lack mean ergodic shadowing",
                     "Orbit distances of sampled pairs under f(x) = 1 - x",
                     defaults("isometry-distal", "interval-isometry", 1000, 0.01, 0.01, 0.01, 1000),
                     {"interval-isometry"},
                     {{"pairs", "sample, x, y, d0, min_distance, max_distance, tolerance (d0/2), kind"}},
                     run_isometry_distal, check_isometry_distal});
        return r;
    }();
    return registry;
}

inline const ExperimentSpec& find_experiment(std::string_view name) {
    for (const auto& e : experiment_registry())
        if (e.name == name) return e;
    throw ConfigError("unknown experiment '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Reports

struct ExperimentReport {
    ExperimentConfig config;
    Json results;
    Tables tables;
    bool pass = false;
    double duration_seconds = 0;
    std::string timestamp;

    /// Everything except provenance; identical configs give identical payloads.
    Json payload() const {
        Json tabs = Json::object();
        for (const auto& [name, t] : tables) {
            const auto text = t.str();
            std::uint64_t h = 0xcbf29ce484222325ULL;
            for (unsigned char ch : text) h = (h ^ ch) * 0x100000001b3ULL;
            char hex[17];
            std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(h));
            tabs[name] = {{"rows", t.rows.size()}, {"fnv1a64", hex}};
        }
        return {{"config", config.to_json()}, {"results", results}, {"tables", tabs}, {"pass", pass}};
    }

    Json to_json() const {
        Json j = payload();
        j["provenance"] = {{"library_version", kVersion},
                           {"duration_seconds", duration_seconds},
                           {"timestamp", timestamp}};
        return j;
    }
};

inline std::string utc_timestamp() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

/// Config for `name` with the registered defaults.
inline ExperimentConfig default_config(std::string_view name) { return find_experiment(name).defaults; }

inline ExperimentReport run_experiment(const ExperimentConfig& config) {
    const auto& spec = find_experiment(config.experiment);
    config.validate();
    if (std::find(spec.systems.begin(), spec.systems.end(), config.system) == spec.systems.end())
        throw ConfigError("experiment '" + spec.name + "' does not support system '" + config.system + "'");
    const auto t0 = std::chrono::steady_clock::now();
    auto res = spec.run(config);
    ExperimentReport rep;
    rep.duration_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    rep.config = config;
    rep.results = std::move(res.results);
    rep.tables = std::move(res.tables);
    rep.pass = res.pass;
    rep.timestamp = utc_timestamp();
    return rep;
}

/// Recomputes the verdict from the report's CSV tables.
inline bool recheck_from_csv(const ExperimentReport& rep) {
    Tables reparsed;
    for (const auto& [name, t] : rep.tables) reparsed[name] = CsvTable::parse(t.str());
    return find_experiment(rep.config.experiment).csv_check(reparsed, rep.config);
}

inline std::filesystem::path default_output_dir() {
    const char* env = std::getenv(kOutDirVariable);
    return env && *env ? std::filesystem::path(env) : std::filesystem::path("shadowlab-out");
}

inline std::filesystem::path report_path(const ExperimentConfig& c) {
    return c.output_path.empty() ? default_output_dir() / (c.experiment + ".json") : std::filesystem::path(c.output_path);
}

/// CSV table `name` lives next to the report: <stem>.<name>.csv.
inline std::filesystem::path table_path(const std::filesystem::path& report, const std::string& name) {
    auto p = report;
    p.replace_extension();
    return p.string() + "." + name + ".csv";
}

/// Writes the JSON report and its CSV tables; returns the report path.
inline std::filesystem::path write_report(const ExperimentReport& rep) {
    const auto path = report_path(rep.config);
    std::error_code ec;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
    auto write = [](const std::filesystem::path& p, const std::string& text) {
        std::ofstream os(p, std::ios::binary);
        if (!os) throw IoError("cannot open '" + p.string() + "' for writing");
        os << text;
        if (!os) throw IoError("failed writing '" + p.string() + "'");
    };
    auto j = rep.to_json();
    j["csv"] = Json::object();
    for (const auto& [name, t] : rep.tables) {
        const auto tp = table_path(path, name);
        write(tp, t.str());
        j["csv"][name] = tp.filename().string();
    }
    write(path, j.dump(2) + "\n");
    return path;
}

}  // namespace shadowlab
