#pragma once

// Tracing a pseudo orbit by a candidate point and judging the result under
// each shadowing criterion: pointwise, in average, mean ergodic (error below
// ε off a set of upper density below ε) and d-lower (good set of positive
// lower density). All lim sup / lim inf are tail-window estimates.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "density.hpp"
#include "pseudo_orbit.hpp"
#include "system.hpp"

namespace shadowlab {

enum class Criterion { pointwise, average, mean_ergodic, d_lower };

inline std::string_view to_string(Criterion c) {
    switch (c) {
        case Criterion::pointwise: return "pointwise";
        case Criterion::average: return "average";
        case Criterion::mean_ergodic: return "mean_ergodic";
        case Criterion::d_lower: return "d_lower";
    }
    return "unknown";
}

inline Criterion criterion_from_string(std::string_view s) {
    for (auto c : {Criterion::pointwise, Criterion::average, Criterion::mean_ergodic, Criterion::d_lower})
        if (to_string(c) == s) return c;
    throw std::invalid_argument("unknown criterion '" + std::string(s) + "'");
}

/// max over tail endpoints n of (1/n) Σ_{i<n} errors[i].
inline double cesaro_estimate(std::span<const double> errors, const Rational& tail_fraction) {
    if (errors.empty()) throw std::invalid_argument("cesaro_estimate: empty error sequence");
    const std::size_t first = tail_start(errors.size(), tail_fraction);
    long double sum = 0, best = 0;
    for (std::size_t n = 1; n <= errors.size(); ++n) {
        sum += errors[n - 1];
        if (n >= first) best = std::max(best, sum / static_cast<long double>(n));
    }
    return static_cast<double>(best);
}

/// Error sequence err_i = d(f^i(z), x_i) with its summary statistics.
struct TraceReport {
    std::vector<double> errors;
    double diameter = 1.0;
    Rational tail_fraction = kDefaultTailFraction;
    double cesaro_mean_estimate = 0;
    double sup_error = 0;

    TraceReport() = default;
    TraceReport(std::vector<double> errs, double diam, Rational tf = kDefaultTailFraction)
        : errors(std::move(errs)), diameter(diam), tail_fraction(tf) {
        if (errors.empty()) throw std::invalid_argument("TraceReport: empty error sequence");
        for (double e : errors)
            if (e < 0 || e > diameter * (1 + 1e-12))
                throw std::domain_error("TraceReport: error " + std::to_string(e) + " outside [0, diameter]");
        cesaro_mean_estimate = cesaro_estimate(errors, tail_fraction);
        sup_error = *std::max_element(errors.begin(), errors.end());
    }

    std::size_t horizon() const noexcept { return errors.size(); }
    IndexSet bad_set(double epsilon) const { return threshold_set(errors, epsilon); }
    IndexSet good_set(double epsilon) const { return bad_set(epsilon).complement(); }
    DensityProfile bad_profile(double epsilon) const { return density_profile(bad_set(epsilon), tail_fraction); }
    /// Lower estimate of the density of {i : err_i < ε}.
    Rational good_lower_density(double epsilon) const {
        return density_profile(good_set(epsilon), tail_fraction).lower_estimate;
    }
};

/// Iterates the map once per step from z.
template <class P>
TraceReport trace(const System<P>& s, const P& z, const PseudoOrbit<P>& p,
                  const Rational& tail_fraction = kDefaultTailFraction) {
    if (p.horizon() == 0) throw std::invalid_argument("trace: pseudo orbit has horizon 0");
    std::vector<double> err;
    err.reserve(p.horizon());
    P fz = z;
    for (std::size_t i = 0; i < p.horizon(); ++i) {
        err.push_back(s.metric(fz, p.points[i]));
        if (i + 1 < p.horizon()) fz = s.map(fz);
    }
    return TraceReport(std::move(err), s.diameter, tail_fraction);
}

/// Outcome of one criterion on one report. `statistic` is what the criterion
/// compares against its threshold; smaller is better for every criterion.
struct Verdict {
    Criterion criterion = Criterion::pointwise;
    double epsilon = 0;
    bool satisfied = false;
    double statistic = 0;
    TraceReport evidence;
};

/// sup error < ε. The inequality is strict: sup = ε fails.
inline Verdict check_pointwise(const TraceReport& r, double epsilon) {
    return {Criterion::pointwise, epsilon, r.sup_error < epsilon, r.sup_error, r};
}

inline Verdict check_average(const TraceReport& r, double epsilon) {
    return {Criterion::average, epsilon, r.cesaro_mean_estimate < epsilon, r.cesaro_mean_estimate, r};
}

/// Errors below error_threshold except on a set whose upper estimate is
/// below density_threshold.
inline Verdict check_mean_ergodic(const TraceReport& r, double error_threshold, double density_threshold) {
    const auto upper = r.bad_profile(error_threshold).upper_estimate;
    return {Criterion::mean_ergodic, error_threshold, upper.less_than(density_threshold), upper.to_double(), r};
}

inline Verdict check_mean_ergodic(const TraceReport& r, double epsilon) {
    return check_mean_ergodic(r, epsilon, epsilon);
}

/// Good set {i : err_i < ε} has a strictly positive lower estimate.
inline Verdict check_d_lower(const TraceReport& r, double epsilon) {
    const auto lower = r.good_lower_density(epsilon);
    return {Criterion::d_lower, epsilon, lower.num() > 0, -lower.to_double(), r};
}

inline Verdict check(const TraceReport& r, Criterion c, double epsilon) {
    switch (c) {
        case Criterion::pointwise: return check_pointwise(r, epsilon);
        case Criterion::average: return check_average(r, epsilon);
        case Criterion::mean_ergodic: return check_mean_ergodic(r, epsilon);
        case Criterion::d_lower: return check_d_lower(r, epsilon);
    }
    throw std::invalid_argument("unknown criterion");
}

/// A verdict with the point that produced it.
template <class P>
struct ShadowVerdict : Verdict {
    std::optional<P> witness;
    std::size_t witness_index = 0;
    std::size_t candidates_evaluated = 0;
    std::size_t net_size = 0;
};

template <class P>
struct SearchOptions {
    /// Extra candidates tried after the net (indices net_size, net_size + 1, ...).
    std::vector<P> hints;
    std::size_t max_candidates = kMaxNetSize;
    Rational tail_fraction = kDefaultTailFraction;
};

namespace detail {

/// Streams the criterion statistic for one candidate and gives up as soon as
/// a lower bound on it exceeds `bar`. Returns nullopt when abandoned.
template <class P>
std::optional<double> scan_statistic(const System<P>& s, const P& z, const PseudoOrbit<P>& p, Criterion c,
                                     double epsilon, std::size_t first_endpoint, double bar) {
    const std::size_t n_total = p.horizon();
    const long double N = static_cast<long double>(n_total);
    long double sum = 0, best = 0;
    double sup = 0;
    std::size_t count = 0;
    long double lower_good = std::numeric_limits<long double>::infinity();
    P fz = z;
    for (std::size_t i = 0; i < n_total; ++i) {
        const double e = s.metric(fz, p.points[i]);
        const std::size_t n = i + 1;
        switch (c) {
            case Criterion::pointwise:
                sup = std::max(sup, e);
                if (sup > bar) return std::nullopt;
                break;
            case Criterion::average:
                sum += e;
                if (n >= first_endpoint) best = std::max(best, sum / n);
                if (static_cast<double>(std::max(best, sum / N)) > bar) return std::nullopt;
                break;
            case Criterion::mean_ergodic:
                if (e >= epsilon) ++count;
                // Same rounding as Rational::to_double so ranking matches the final verdict.
                if (n >= first_endpoint) best = std::max<long double>(best, static_cast<double>(count) / static_cast<double>(n));
                if (std::max(static_cast<double>(best), static_cast<double>(count) / static_cast<double>(n_total)) > bar)
                    return std::nullopt;
                break;
            case Criterion::d_lower:
                if (e < epsilon) ++count;
                if (n >= first_endpoint)
                    lower_good = std::min<long double>(lower_good, static_cast<double>(count) / static_cast<double>(n));
                break;
        }
        if (i + 1 < n_total) fz = s.map(fz);
    }
    switch (c) {
        case Criterion::pointwise: return sup;
        case Criterion::average:
        case Criterion::mean_ergodic: return static_cast<double>(best);
        case Criterion::d_lower: return static_cast<double>(-lower_good);
    }
    return std::nullopt;
}

}  // namespace detail

/// Best candidate among the ε-net at `net_resolution` (plus any hints) under
/// criterion c, minimizing the criterion statistic with ties going to the
/// lower candidate index.
///
/// The answer is one-sided: satisfied == true certifies a tracer exists;
/// false only says no candidate at this resolution traces p.
template <class P>
ShadowVerdict<P> search_tracer(const System<P>& s, const PseudoOrbit<P>& p, double epsilon, Criterion c,
                               double net_resolution, const SearchOptions<P>& opts = {}) {
    if (!(net_resolution > 0)) throw std::invalid_argument("search_tracer: net resolution must be positive");
    if (p.horizon() == 0) throw std::invalid_argument("search_tracer: empty pseudo orbit");
    const std::size_t n_net = s.net_size(net_resolution);
    if (n_net + opts.hints.size() > opts.max_candidates)
        throw ResourceError("search_tracer: candidate set exceeds budget of " + std::to_string(opts.max_candidates),
                            n_net + opts.hints.size());
    const auto net = s.build_net(net_resolution);
    const std::size_t first = tail_start(p.horizon(), opts.tail_fraction);

    double best = std::numeric_limits<double>::infinity();
    std::size_t best_index = std::numeric_limits<std::size_t>::max();
    std::size_t evaluated = 0;
    auto consider = [&](const P& z, std::size_t index) {
        ++evaluated;
        const auto stat = detail::scan_statistic(s, z, p, c, epsilon, first, best);
        if (!stat) return;
        if (*stat < best || (*stat == best && index < best_index)) {
            best = *stat;
            best_index = index;
        }
    };
    // Hints first: a good hint sets a low bar that prunes most of the net.
    for (std::size_t h = 0; h < opts.hints.size(); ++h) consider(opts.hints[h], net.size() + h);
    for (std::size_t k = 0; k < net.size(); ++k) consider(net[k], k);

    const P& z = best_index < net.size() ? net[best_index] : opts.hints[best_index - net.size()];
    ShadowVerdict<P> out;
    static_cast<Verdict&>(out) = check(trace(s, z, p, opts.tail_fraction), c, epsilon);
    out.witness = z;
    out.witness_index = best_index;
    out.candidates_evaluated = evaluated;
    out.net_size = net.size();
    return out;
}

/// Diagonal point for a pseudo orbit on the full shift: z_i is the first
/// symbol of x_i, followed by the symbols of the last point. Where the next
/// prefix_depth steps have no break and step errors are below
/// 2^-prefix_depth, σ^i(z) agrees with x_i on its first prefix_depth + 1
/// symbols.
inline SymbolPoint shift_constructive_tracer(const PseudoOrbit<SymbolPoint>& p, std::size_t prefix_depth) {
    if (prefix_depth == 0) throw std::invalid_argument("shift_constructive_tracer: prefix depth must be positive");
    if (p.horizon() < prefix_depth)
        throw std::invalid_argument("shift_constructive_tracer: horizon " + std::to_string(p.horizon()) +
                                    " shorter than prefix depth " + std::to_string(prefix_depth));
    const auto& last = p.points.back();
    const std::size_t length = last.length();
    std::vector<std::uint8_t> z;
    z.reserve(length);
    for (std::size_t i = 0; i + 1 < p.horizon() && z.size() < length; ++i) z.push_back(p.points[i][0]);
    for (std::size_t j = 0; z.size() < length && j < last.stored(); ++j) z.push_back(last[j]);
    return SymbolPoint(std::move(z), last.alphabet(), length);
}

/// Indices i whose window [i, i + depth) meets no break; the constructive
/// tracer is guaranteed within 2^-depth there.
inline IndexSet break_free_windows(const IndexSet& breaks, std::size_t depth) {
    return IndexSet::where(breaks.horizon(), [&](std::size_t i) {
        const std::size_t hi = std::min(breaks.horizon(), i + depth);
        return breaks.count_below(hi) == breaks.count_below(i);
    });
}

/// Sums behind (1/n) Σ_{i<n} a_{ik} ≤ k · (1/(nk)) Σ_{l<nk} a_l for n = ⌊len/k⌋.
/// Both sides share the factor 1/n, so the inequality is sampled ≤ full.
template <class T>
struct PowerSampling {
    std::size_t n = 0;
    T sampled{};
    T full{};
    bool holds() const { return sampled <= full; }
};

/// For non-negative terms summed in index order, sampled ≤ full holds exactly,
/// including in floating point (rounding is monotone).
template <class T>
PowerSampling<T> power_sampling(std::span<const T> a, std::size_t k) {
    if (k == 0) throw std::invalid_argument("power_sampling: k must be ≥ 1");
    PowerSampling<T> out;
    out.n = a.size() / k;
    for (std::size_t l = 0; l < out.n * k; ++l) {
        if (a[l] < T{}) throw std::domain_error("power_sampling: negative term");
        out.full += a[l];
        if (l % k == 0) out.sampled += a[l];
    }
    return out;
}

}  // namespace shadowlab
