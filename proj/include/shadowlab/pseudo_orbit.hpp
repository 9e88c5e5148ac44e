#pragma once

// Approximate orbits: δ-pseudo orbits, concatenations of δ-chains with sparse
// junctions, the interval-isometry block sequence, orbit interleaving for
// powers, and the two-orbit witness sequence used for proximality.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "density.hpp"
#include "system.hpp"

namespace shadowlab {

enum class OrbitKind { exact, delta_pseudo, delta_chain, delta_ergodic, almost_average };

inline std::string_view to_string(OrbitKind k) {
    switch (k) {
        case OrbitKind::exact: return "exact";
        case OrbitKind::delta_pseudo: return "delta_pseudo";
        case OrbitKind::delta_chain: return "delta_chain";
        case OrbitKind::delta_ergodic: return "delta_ergodic";
        case OrbitKind::almost_average: return "almost_average";
    }
    return "unknown";
}

inline OrbitKind orbit_kind_from_string(std::string_view s) {
    for (auto k : {OrbitKind::exact, OrbitKind::delta_pseudo, OrbitKind::delta_chain,
                   OrbitKind::delta_ergodic, OrbitKind::almost_average})
        if (to_string(k) == s) return k;
    throw std::invalid_argument("unknown orbit kind '" + std::string(s) + "'");
}

/// A finite approximate orbit. break_set holds the indices i with
/// d(f(x_i), x_{i+1}) ≥ delta, over horizon = points.size().
template <class P>
struct PseudoOrbit {
    std::string system_name;
    std::vector<P> points;
    double delta = 0;
    OrbitKind kind = OrbitKind::exact;
    IndexSet break_set{1};
    std::uint64_t seed = 0;
    /// Scheduled chain ends, whether or not the jump there reached delta.
    IndexSet junctions{1};
    /// Ceiling on the tail upper density of break_set, for delta_ergodic orbits.
    std::optional<double> density_threshold;

    std::size_t horizon() const noexcept { return points.size(); }
};

/// d(f(x_i), x_{i+1}) for i < N - 1.
template <class P>
std::vector<double> step_errors(const System<P>& s, const std::vector<P>& points) {
    std::vector<double> out;
    if (points.size() < 2) return out;
    out.reserve(points.size() - 1);
    for (std::size_t i = 0; i + 1 < points.size(); ++i) out.push_back(s.metric(s.map(points[i]), points[i + 1]));
    return out;
}

template <class P>
IndexSet compute_break_set(const System<P>& s, const std::vector<P>& points, double delta) {
    if (points.empty()) throw std::invalid_argument("compute_break_set: empty point sequence");
    const auto err = step_errors(s, points);
    return IndexSet::where(points.size(), [&](std::size_t i) { return i < err.size() && err[i] >= delta; });
}

namespace detail {

/// A point strictly within delta of f(p); falls back to f(p) itself.
template <class P>
P perturbed_step(const System<P>& s, const P& p, double delta, double radius, Rng& rng) {
    P image = s.map(p);
    if (!(radius > 0)) return image;
    for (int attempt = 0; attempt < 16; ++attempt) {
        P q = s.perturb(image, radius, rng);
        if (s.metric(image, q) < delta) return q;
    }
    return image;
}

}  // namespace detail

/// x_0 = start, x_{i+1} within distance < delta of f(x_i). `radius` is the
/// perturbation size (0 reproduces the exact orbit); it defaults to delta.
template <class P>
PseudoOrbit<P> perturbed_orbit(const System<P>& s, const P& start, double delta, std::size_t horizon,
                               std::uint64_t seed, std::optional<double> radius = std::nullopt) {
    if (!(delta > 0)) throw std::invalid_argument("perturbed_orbit: delta must be positive");
    if (horizon == 0) throw std::invalid_argument("perturbed_orbit: horizon must be positive");
    const double r = std::min(radius.value_or(delta), delta);
    Rng rng(seed);
    PseudoOrbit<P> out;
    out.system_name = s.name;
    out.delta = delta;
    out.seed = seed;
    out.kind = r > 0 ? OrbitKind::delta_pseudo : OrbitKind::exact;
    out.points.reserve(horizon);
    out.points.push_back(start);
    for (std::size_t i = 1; i < horizon; ++i) out.points.push_back(detail::perturbed_step(s, out.points.back(), delta, r, rng));
    out.break_set = compute_break_set(s, out.points, delta);
    out.junctions = IndexSet(horizon);
    return out;
}

/// Block j has length 2^j (saturating).
inline std::function<std::size_t(std::size_t)> doubling_schedule() {
    return [](std::size_t j) {
        return j >= 62 ? std::numeric_limits<std::size_t>::max() / 2 : std::size_t{1} << j;
    };
}

/// Block 0 has length 1 and block j ≥ 1 has length j·j!, which is j times
/// everything before it; the share of the latest block tends to 1.
inline std::function<std::size_t(std::size_t)> superexponential_schedule() {
    return [](std::size_t j) -> std::size_t {
        if (j == 0) return 1;
        std::size_t f = 1;
        for (std::size_t i = 2; i <= j; ++i) {
            if (f > std::numeric_limits<std::size_t>::max() / (4 * i * j)) return std::numeric_limits<std::size_t>::max() / 2;
            f *= i;
        }
        return j * f;
    };
}

/// Block lengths covering [0, horizon), the last one clipped.
inline std::vector<std::size_t> block_lengths(const std::function<std::size_t(std::size_t)>& schedule,
                                              std::size_t horizon) {
    std::vector<std::size_t> out;
    std::size_t covered = 0, prev = 0;
    for (std::size_t j = 0; covered < horizon; ++j) {
        const std::size_t len = schedule(j);
        if (len == 0) throw std::invalid_argument("block schedule produced a block of length 0 at j = " + std::to_string(j));
        if (len < prev) throw std::invalid_argument("block schedule must be nondecreasing (block " + std::to_string(j) + ")");
        prev = len;
        const std::size_t take = std::min(len, horizon - covered);
        out.push_back(take);
        covered += take;
    }
    return out;
}

/// Concatenated δ-chains: chain j has gap_schedule(j) points, starts at
/// chain_starts[j] (or a sampled point once the list runs out) and continues
/// as a perturbed orbit. The jump after each chain is unconstrained.
template <class P>
PseudoOrbit<P> ergodic_pseudo_orbit(const System<P>& s, const std::vector<P>& chain_starts, double delta,
                                    const std::function<std::size_t(std::size_t)>& gap_schedule,
                                    std::size_t horizon, std::uint64_t seed,
                                    double max_break_density = 0.25,
                                    std::optional<double> radius = std::nullopt) {
    if (!(delta > 0)) throw std::invalid_argument("ergodic_pseudo_orbit: delta must be positive");
    if (horizon == 0) throw std::invalid_argument("ergodic_pseudo_orbit: horizon must be positive");
    const auto lengths = block_lengths(gap_schedule, horizon);
    const double r = std::min(radius.value_or(delta), delta);
    Rng rng(seed);
    PseudoOrbit<P> out;
    out.system_name = s.name;
    out.delta = delta;
    out.seed = seed;
    out.kind = OrbitKind::delta_ergodic;
    out.points.reserve(horizon);
    std::vector<std::size_t> ends;
    for (std::size_t j = 0; j < lengths.size(); ++j) {
        out.points.push_back(j < chain_starts.size() ? chain_starts[j] : s.sample(rng));
        for (std::size_t k = 1; k < lengths[j]; ++k)
            out.points.push_back(detail::perturbed_step(s, out.points.back(), delta, r, rng));
        if (out.points.size() < horizon) ends.push_back(out.points.size() - 1);
    }
    out.break_set = compute_break_set(s, out.points, delta);
    out.junctions = IndexSet(horizon, std::move(ends));
    for (auto i : out.break_set.members())
        if (!out.junctions.contains(i))
            throw std::logic_error("ergodic_pseudo_orbit: break inside a chain at " + std::to_string(i));
    const auto profile = density_profile(out.break_set);
    if (!profile.upper_estimate.less_than(max_break_density))
        throw std::invalid_argument("ergodic_pseudo_orbit: break density " + profile.upper_estimate.str() +
                                    " not below threshold " + std::to_string(max_break_density));
    out.density_threshold = max_break_density;
    return out;
}

/// a_0 ∨ a_1 ∨ ... ∨ a_n for f(x) = 1 - x, where a_0 = (0, 1) and a_j is
/// (0, 1) repeated j times followed by (1, 0) repeated j times.
/// The break set is the same for every delta in (0, 1].
inline PseudoOrbit<double> isometry_block_sequence(std::size_t n_blocks, double delta = 0.5) {
    if (n_blocks < 1) throw std::invalid_argument("isometry_block_sequence: need at least one block");
    const auto s = make_interval_isometry();
    PseudoOrbit<double> out;
    out.system_name = s.name;
    out.delta = delta;
    out.kind = OrbitKind::delta_ergodic;
    out.points = {0.0, 1.0};
    std::vector<std::size_t> ends{1};
    for (std::size_t j = 1; j <= n_blocks; ++j) {
        for (std::size_t r = 0; r < j; ++r) out.points.insert(out.points.end(), {0.0, 1.0});
        for (std::size_t r = 0; r < j; ++r) out.points.insert(out.points.end(), {1.0, 0.0});
        if (j < n_blocks) ends.push_back(out.points.size() - 1);
    }
    out.break_set = compute_break_set(s, out.points, delta);
    out.junctions = IndexSet(out.points.size(), std::move(ends));
    return out;
}

/// Turns a pseudo orbit of f^k into one of f by inserting f(x_i), ...,
/// f^{k-1}(x_i) after each x_i. Requires k ≥ 2.
template <class P>
PseudoOrbit<P> interleave_for_power(const System<P>& s, const PseudoOrbit<P>& base, unsigned k) {
    if (k < 2) throw std::invalid_argument("interleave_for_power: k must be ≥ 2");
    PseudoOrbit<P> out;
    out.system_name = s.name;
    out.delta = base.delta;
    out.kind = base.kind;
    out.seed = base.seed;
    out.points.reserve(base.horizon() * k);
    for (const auto& x : base.points) {
        P p = x;
        for (unsigned j = 0; j < k; ++j) {
            out.points.push_back(p);
            if (j + 1 < k) p = s.map(p);
        }
    }
    out.break_set = compute_break_set(s, out.points, out.delta);
    std::vector<std::size_t> ends;
    for (auto i : base.junctions.members()) ends.push_back(k * i + k - 1);
    out.junctions = IndexSet(out.points.size(), std::move(ends));
    out.density_threshold = base.density_threshold;
    return out;
}

/// The witness sequence w together with its block bookkeeping: m1 holds the
/// indices copied from the orbit of x, m2 those copied from the orbit of y.
template <class P>
struct WitnessSequence {
    PseudoOrbit<P> orbit;
    IndexSet m1{1};
    IndexSet m2{1};
    std::vector<std::size_t> block_lengths;
};

/// w_i = f^i(x) on even-numbered blocks and f^i(y) on odd-numbered blocks.
template <class P>
WitnessSequence<P> proximality_witness_sequence(const System<P>& s, const P& x, const P& y,
                                                const std::function<std::size_t(std::size_t)>& block_schedule,
                                                std::size_t horizon, double delta) {
    if (horizon == 0) throw std::invalid_argument("proximality_witness_sequence: horizon must be positive");
    if (!(delta > 0)) throw std::invalid_argument("proximality_witness_sequence: delta must be positive");
    WitnessSequence<P> out;
    out.block_lengths = block_lengths(block_schedule, horizon);
    auto& w = out.orbit;
    w.system_name = s.name;
    w.delta = delta;
    w.kind = OrbitKind::delta_ergodic;
    w.points.reserve(horizon);
    std::vector<std::size_t> in_m1, in_m2, ends;
    P fx = x, fy = y;
    std::size_t i = 0;
    for (std::size_t j = 0; j < out.block_lengths.size(); ++j) {
        for (std::size_t r = 0; r < out.block_lengths[j]; ++r, ++i) {
            w.points.push_back(j % 2 == 0 ? fx : fy);
            (j % 2 == 0 ? in_m1 : in_m2).push_back(i);
            fx = s.map(fx);
            fy = s.map(fy);
        }
        if (i < horizon) ends.push_back(i - 1);
    }
    w.break_set = compute_break_set(s, w.points, delta);
    w.junctions = IndexSet(horizon, std::move(ends));
    out.m1 = IndexSet(horizon, std::move(in_m1));
    out.m2 = IndexSet(horizon, std::move(in_m2));
    return out;
}

/// Tail-window estimate of lim sup (1/n) Σ_{i<n} d(f(x_i), x_{i+1}).
template <class P>
double average_error_of_step(const System<P>& s, const PseudoOrbit<P>& p,
                             const Rational& tail_fraction = kDefaultTailFraction) {
    if (p.horizon() < 2) throw std::invalid_argument("average_error_of_step: horizon must be ≥ 2");
    const auto err = step_errors(s, p.points);
    const std::size_t first = tail_start(err.size(), tail_fraction);
    long double sum = 0, best = 0;
    for (std::size_t n = 1; n <= err.size(); ++n) {
        sum += err[n - 1];
        if (n >= first) best = std::max(best, sum / static_cast<long double>(n));
    }
    return static_cast<double>(best);
}

/// Almost δ-average: the step-error estimate is below delta.
template <class P>
bool is_almost_average(const System<P>& s, const PseudoOrbit<P>& p, double delta,
                       const Rational& tail_fraction = kDefaultTailFraction) {
    return average_error_of_step(s, p, tail_fraction) < delta;
}

// ---------------------------------------------------------------------------
// Text format
//
//   shadowlab-pseudo-orbit 1
//   system <name>
//   delta <17 significant digits>
//   kind <kind>
//   seed <integer>
//   horizon <N>
//   <one point per line, in the system's point syntax>
//   breaks <count> <index> <index> ...

template <class P>
void write_pseudo_orbit(std::ostream& os, const System<P>& s, const PseudoOrbit<P>& p) {
    os << "shadowlab-pseudo-orbit 1\n";
    os << "system " << p.system_name << "\n";
    os << "delta " << detail::format_real(p.delta) << "\n";
    os << "kind " << to_string(p.kind) << "\n";
    os << "seed " << p.seed << "\n";
    os << "horizon " << p.horizon() << "\n";
    for (const auto& x : p.points) os << s.format(x) << "\n";
    os << "breaks " << p.break_set.size();
    for (auto i : p.break_set.members()) os << ' ' << i;
    os << "\n";
}

template <class P>
PseudoOrbit<P> read_pseudo_orbit(std::istream& is, const System<P>& s) {
    auto expect = [&](const std::string& key) {
        std::string line;
        if (!std::getline(is, line)) throw std::runtime_error("pseudo-orbit file truncated before '" + key + "'");
        if (line.rfind(key + " ", 0) != 0) throw std::runtime_error("expected '" + key + "', got '" + line + "'");
        return line.substr(key.size() + 1);
    };
    if (expect("shadowlab-pseudo-orbit") != "1") throw std::runtime_error("unsupported pseudo-orbit format version");
    PseudoOrbit<P> p;
    p.system_name = expect("system");
    if (p.system_name != s.name)
        throw std::runtime_error("pseudo-orbit is for system '" + p.system_name + "', not '" + s.name + "'");
    p.delta = detail::parse_real(expect("delta"));
    p.kind = orbit_kind_from_string(expect("kind"));
    p.seed = std::stoull(expect("seed"));
    const std::size_t n = std::stoull(expect("horizon"));
    if (n == 0) throw std::runtime_error("pseudo-orbit horizon must be positive");
    p.points.reserve(n);
    std::string line;
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::getline(is, line)) throw std::runtime_error("pseudo-orbit file truncated in points");
        p.points.push_back(s.parse(line));
    }
    std::istringstream breaks(expect("breaks"));
    std::size_t count = 0;
    breaks >> count;
    std::vector<std::size_t> idx(count);
    for (auto& i : idx)
        if (!(breaks >> i)) throw std::runtime_error("pseudo-orbit break list shorter than its count");
    p.break_set = IndexSet(n, std::move(idx));
    p.junctions = IndexSet(n);
    if (!(p.break_set == compute_break_set(s, p.points, p.delta)))
        throw std::runtime_error("pseudo-orbit break list does not match the points");
    return p;
}

}  // namespace shadowlab
