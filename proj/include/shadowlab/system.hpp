#pragma once

// Compact metric systems (X, d, f) behind one value type, plus the product,
// power and conjugate constructions.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "binary_angle.hpp"
#include "symbol_point.hpp"

namespace shadowlab {

using Rng = std::mt19937_64;

enum class PointKind { interval, circle, symbol_sequence, two_circles, finite_set, product_pair };

inline std::string_view to_string(PointKind k) {
    switch (k) {
        case PointKind::interval: return "interval";
        case PointKind::circle: return "circle";
        case PointKind::symbol_sequence: return "symbol_sequence";
        case PointKind::two_circles: return "two_circles";
        case PointKind::finite_set: return "finite_set";
        case PointKind::product_pair: return "product_pair";
    }
    return "unknown";
}

/// Thrown when a requested discretization exceeds what a space allows.
class ResourceError : public std::runtime_error {
public:
    ResourceError(const std::string& what, std::size_t required)
        : std::runtime_error(what + " (required net size " + std::to_string(required) + ")"),
          required_(required) {}
    std::size_t required() const noexcept { return required_; }

private:
    std::size_t required_;
};

inline constexpr std::size_t kMaxNetSize = std::size_t{1} << 24;

/// A compact metric space with a continuous self-map.
///
/// Every field is a pure function; a System is immutable once built and can
/// be shared across threads.
template <class P>
struct System {
    using Point = P;

    std::string name;
    PointKind kind = PointKind::interval;
    double diameter = 1.0;
    std::function<double(const P&, const P&)> metric;
    std::function<P(const P&)> map;
    /// Draws a point of the space.
    std::function<P(Rng&)> sample;
    /// Draws a point near `p`, meant to land within `radius` of it. Callers
    /// that need the strict bound re-check with the metric.
    std::function<P(const P& p, double radius, Rng&)> perturb;
    /// Finite set covering the space within `resolution`.
    std::function<std::vector<P>(double resolution)> net;
    /// Size of net(resolution) without building it.
    std::function<std::size_t(double resolution)> net_size;
    double min_resolution = 0.0;
    std::function<std::string(const P&)> format;
    std::function<P(std::string_view)> parse;

    P iterate(P p, std::size_t n) const {
        for (std::size_t i = 0; i < n; ++i) p = map(p);
        return p;
    }

    std::vector<P> orbit(const P& start, std::size_t horizon) const {
        std::vector<P> out;
        out.reserve(horizon);
        P p = start;
        for (std::size_t i = 0; i < horizon; ++i) {
            out.push_back(p);
            if (i + 1 < horizon) p = map(p);
        }
        return out;
    }

    std::vector<P> build_net(double resolution) const {
        if (!(resolution > 0)) throw std::invalid_argument(name + ": net resolution must be positive");
        const std::size_t n = net_size(resolution);
        if (resolution < min_resolution || n > kMaxNetSize)
            throw ResourceError(name + ": resolution " + std::to_string(resolution) +
                                    " below minimum " + std::to_string(min_resolution),
                                n);
        return net(resolution);
    }
};

namespace detail {

inline std::string format_real(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

inline double parse_real(std::string_view s) {
    std::size_t used = 0;
    const std::string str(s);
    const double v = std::stod(str, &used);
    if (used != str.size()) throw std::invalid_argument("bad real '" + str + "'");
    return v;
}

/// Points of the interval lattice k/2^52 are closed under x ↦ 1 - x, so
/// samples drawn here keep isometry arithmetic exact.
inline double sample_unit_lattice(Rng& rng) {
    std::uniform_int_distribution<std::uint64_t> k(0, std::uint64_t{1} << 52);
    return std::ldexp(static_cast<double>(k(rng)), -52);
}

inline std::size_t interval_net_size(double r) {
    return static_cast<std::size_t>(std::ceil(1.0 / r - 1e-12)) + 1;
}

inline std::vector<double> interval_net(double r) {
    const std::size_t n = interval_net_size(r) - 1;
    std::vector<double> out(n + 1);
    for (std::size_t k = 0; k <= n; ++k) out[k] = static_cast<double>(k) / static_cast<double>(n);
    return out;
}

inline double circle_arc(double a, double b) {
    double d = std::fabs(a - b);
    d = std::fmod(d, 2 * std::numbers::pi);
    return std::min(d, 2 * std::numbers::pi - d);
}

inline double wrap_angle(double a) {
    a = std::fmod(a, 2 * std::numbers::pi);
    if (a < 0) a += 2 * std::numbers::pi;
    if (a >= 2 * std::numbers::pi) a = 0;
    return a;
}

/// Smallest m with 2π / 2^m ≤ r.
inline unsigned circle_net_bits(double r) {
    unsigned m = 0;
    while (m < 63 && 2 * std::numbers::pi / std::ldexp(1.0, static_cast<int>(m)) > r) ++m;
    return m;
}

/// Smallest m with 2^-m ≤ r.
inline unsigned cylinder_depth(double r) {
    unsigned m = 0;
    while (m < 1000 && std::ldexp(1.0, -static_cast<int>(m)) > r) ++m;
    return m;
}

inline std::size_t saturating_pow(std::size_t base, unsigned exp) {
    std::size_t v = 1;
    for (unsigned i = 0; i < exp; ++i) {
        if (v > kMaxNetSize * 4) return v;
        v *= base;
    }
    return v;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Interval systems

inline System<double> make_interval_system(std::string name, std::function<double(double)> f) {
    System<double> s;
    s.name = std::move(name);
    s.kind = PointKind::interval;
    s.diameter = 1.0;
    s.metric = [](double a, double b) { return std::fabs(a - b); };
    s.map = [f = std::move(f)](double x) { return f(x); };
    s.sample = detail::sample_unit_lattice;
    s.perturb = [](double x, double radius, Rng& rng) {
        std::uniform_real_distribution<double> u(-radius, radius);
        return std::clamp(x + u(rng), 0.0, 1.0);
    };
    s.net = detail::interval_net;
    s.net_size = detail::interval_net_size;
    s.min_resolution = 1e-7;
    s.format = detail::format_real;
    s.parse = detail::parse_real;
    return s;
}

/// f(x) = 1 - x on [0, 1].
inline System<double> make_interval_isometry() {
    return make_interval_system("interval-isometry", [](double x) { return 1.0 - x; });
}

/// f(x) = c on [0, 1].
inline System<double> make_constant_map(double c = 0.5) {
    if (c < 0 || c > 1) throw std::invalid_argument("make_constant_map: constant outside [0, 1]");
    return make_interval_system("constant-interval", [c](double) { return c; });
}

inline System<double> make_interval_identity() {
    return make_interval_system("interval-identity", [](double x) { return x; });
}

// ---------------------------------------------------------------------------
// Doubling circle

/// θ ↦ 2θ on the circle of circumference 2π with arc-length metric (diameter π).
/// Points are exact binary angles; sample() draws 64-bit angles.
inline System<BinaryAngle> make_doubling_circle() {
    System<BinaryAngle> s;
    s.name = "doubling-circle";
    s.kind = PointKind::circle;
    s.diameter = std::numbers::pi;
    s.metric = [](const BinaryAngle& a, const BinaryAngle& b) { return arc_distance(a, b); };
    s.map = [](const BinaryAngle& a) { return a.doubled(); };
    s.sample = [](Rng& rng) { return BinaryAngle(rng()); };
    s.perturb = [](const BinaryAngle& a, double radius, Rng& rng) {
        std::uniform_real_distribution<double> u(-radius, radius);
        return a.rotated(u(rng));
    };
    s.net_size = [](double r) { return std::size_t{1} << detail::circle_net_bits(r); };
    s.net = [](double r) {
        const unsigned m = detail::circle_net_bits(r);
        std::vector<BinaryAngle> out;
        out.reserve(std::size_t{1} << m);
        for (std::uint64_t k = 0; k < (std::uint64_t{1} << m); ++k)
            out.emplace_back(m == 0 ? 0 : k << (64 - m));
        return out;
    };
    s.min_resolution = 2 * std::numbers::pi / static_cast<double>(kMaxNetSize);
    s.format = [](const BinaryAngle& a) { return a.to_text(); };
    s.parse = [](std::string_view t) { return BinaryAngle::from_text(t); };
    return s;
}

// ---------------------------------------------------------------------------
// Full shift and the Cantor identity

/// One-sided shift on `alphabet` symbols, truncated to `working_length`,
/// with d(x, y) = Σ [x_i ≠ y_i] 2^-(i+1).
inline System<SymbolPoint> make_full_shift(unsigned alphabet, std::size_t working_length) {
    if (alphabet < 2) throw std::invalid_argument("make_full_shift: alphabet must be ≥ 2");
    if (working_length == 0) throw std::invalid_argument("make_full_shift: working length must be positive");
    System<SymbolPoint> s;
    s.name = "full-shift-" + std::to_string(alphabet);
    s.kind = PointKind::symbol_sequence;
    s.diameter = 1.0 - std::ldexp(1.0, -static_cast<int>(std::min<std::size_t>(working_length, 1000)));
    s.metric = [](const SymbolPoint& a, const SymbolPoint& b) { return cylinder_distance(a, b); };
    s.map = [](const SymbolPoint& p) { return p.shifted(); };
    s.sample = [alphabet, working_length](Rng& rng) {
        std::uniform_int_distribution<unsigned> sym(0, alphabet - 1);
        std::vector<std::uint8_t> v(working_length);
        for (auto& x : v) x = static_cast<std::uint8_t>(sym(rng));
        return SymbolPoint(std::move(v), alphabet, working_length);
    };
    // Keeps the prefix that pins the distance below radius and redraws a
    // 64-symbol stretch after it.
    s.perturb = [alphabet](const SymbolPoint& p, double radius, Rng& rng) {
        const std::size_t m = detail::cylinder_depth(radius);
        if (m >= p.length()) return p;
        std::vector<std::uint8_t> v = p.symbols();
        std::uniform_int_distribution<unsigned> sym(0, alphabet - 1);
        for (std::size_t i = m; i < std::min(v.size(), m + 64); ++i) v[i] = static_cast<std::uint8_t>(sym(rng));
        return SymbolPoint(std::move(v), alphabet, p.length());
    };
    s.net_size = [alphabet](double r) { return detail::saturating_pow(alphabet, detail::cylinder_depth(r)); };
    s.net = [alphabet, working_length](double r) {
        const unsigned m = detail::cylinder_depth(r);
        const std::size_t count = detail::saturating_pow(alphabet, m);
        std::vector<SymbolPoint> out;
        out.reserve(count);
        for (std::size_t code = 0; code < count; ++code) {
            std::vector<std::uint8_t> v(std::min<std::size_t>(m, working_length));
            std::size_t c = code;
            for (std::size_t i = v.size(); i-- > 0;) {
                v[i] = static_cast<std::uint8_t>(c % alphabet);
                c /= alphabet;
            }
            out.emplace_back(std::move(v), alphabet, working_length);
        }
        return out;
    };
    s.min_resolution = 0.0;
    s.format = [](const SymbolPoint& p) { return p.to_text(); };
    s.parse = [alphabet, working_length](std::string_view t) {
        return SymbolPoint::from_text(t, alphabet, working_length);
    };
    return s;
}

/// Identity on the Cantor set, modelled as the 2-symbol sequence space.
inline System<SymbolPoint> make_cantor_identity(std::size_t working_length = 64) {
    auto s = make_full_shift(2, working_length);
    s.name = "cantor-identity";
    s.map = [](const SymbolPoint& p) { return p; };
    return s;
}

// ---------------------------------------------------------------------------
// Two circles

struct TwoCirclesPoint {
    int component = 1;  ///< 1 or 2
    double angle = 0;   ///< radians in [0, 2π)

    TwoCirclesPoint() = default;
    TwoCirclesPoint(int c, double a) : component(c), angle(detail::wrap_angle(a)) {
        if (c != 1 && c != 2) throw std::invalid_argument("TwoCirclesPoint: component must be 1 or 2");
    }
    friend bool operator==(const TwoCirclesPoint&, const TwoCirclesPoint&) = default;
};

/// Disjoint circles C1, C2; f sends θ on one circle to 2θ on the other.
/// Within a circle the metric is arc length; across circles it is
/// 1 + arc(θ, φ), so the circles sit at distance exactly 1.
inline System<TwoCirclesPoint> make_two_circles_swap_double() {
    System<TwoCirclesPoint> s;
    s.name = "two-circles";
    s.kind = PointKind::two_circles;
    s.diameter = 1.0 + std::numbers::pi;
    s.metric = [](const TwoCirclesPoint& a, const TwoCirclesPoint& b) {
        const double arc = detail::circle_arc(a.angle, b.angle);
        return a.component == b.component ? arc : 1.0 + arc;
    };
    s.map = [](const TwoCirclesPoint& p) { return TwoCirclesPoint(3 - p.component, 2 * p.angle); };
    s.sample = [](Rng& rng) {
        std::uniform_int_distribution<int> c(1, 2);
        std::uniform_real_distribution<double> a(0, 2 * std::numbers::pi);
        const int comp = c(rng);
        return TwoCirclesPoint(comp, a(rng));
    };
    s.perturb = [](const TwoCirclesPoint& p, double radius, Rng& rng) {
        std::uniform_real_distribution<double> u(-radius, radius);
        return TwoCirclesPoint(p.component, p.angle + u(rng));
    };
    s.net_size = [](double r) { return 2 * static_cast<std::size_t>(std::ceil(2 * std::numbers::pi / r)); };
    s.net = [](double r) {
        const auto n = static_cast<std::size_t>(std::ceil(2 * std::numbers::pi / r));
        std::vector<TwoCirclesPoint> out;
        out.reserve(2 * n);
        for (int c = 1; c <= 2; ++c)
            for (std::size_t k = 0; k < n; ++k)
                out.emplace_back(c, 2 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n));
        return out;
    };
    s.min_resolution = 1e-6;
    s.format = [](const TwoCirclesPoint& p) {
        return std::to_string(p.component) + "@" + detail::format_real(p.angle);
    };
    s.parse = [](std::string_view t) {
        const auto at = t.find('@');
        if (at == std::string_view::npos) throw std::invalid_argument("two-circles point needs '@'");
        return TwoCirclesPoint(std::stoi(std::string(t.substr(0, at))), detail::parse_real(t.substr(at + 1)));
    };
    return s;
}

// ---------------------------------------------------------------------------
// Finite sets with the discrete metric

/// {0, ..., n-1} with d(i, j) = [i ≠ j] and f(i) = table[i].
inline System<int> make_finite_system(std::string name, std::vector<int> table) {
    const int n = static_cast<int>(table.size());
    if (n < 2) throw std::invalid_argument("make_finite_system: need at least two points");
    for (int v : table)
        if (v < 0 || v >= n) throw std::out_of_range("make_finite_system: map leaves the set");
    System<int> s;
    s.name = std::move(name);
    s.kind = PointKind::finite_set;
    s.diameter = 1.0;
    s.metric = [](int a, int b) { return a == b ? 0.0 : 1.0; };
    s.map = [table = std::move(table)](int i) { return table.at(static_cast<std::size_t>(i)); };
    s.sample = [n](Rng& rng) { return std::uniform_int_distribution<int>(0, n - 1)(rng); };
    s.perturb = [](int i, double, Rng&) { return i; };
    s.net_size = [n](double) { return static_cast<std::size_t>(n); };
    s.net = [n](double) {
        std::vector<int> out(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = i;
        return out;
    };
    s.format = [](int i) { return std::to_string(i); };
    s.parse = [](std::string_view t) { return std::stoi(std::string(t)); };
    return s;
}

// ---------------------------------------------------------------------------
// Combinators

/// X × Y with d = max(d1, d2) and (f × g)(x, y) = (f x, g y).
template <class A, class B>
System<std::pair<A, B>> make_product(const System<A>& a, const System<B>& b) {
    using P = std::pair<A, B>;
    System<P> s;
    s.name = a.name + "*" + b.name;
    s.kind = PointKind::product_pair;
    s.diameter = std::max(a.diameter, b.diameter);
    s.metric = [ma = a.metric, mb = b.metric](const P& p, const P& q) {
        return std::max(ma(p.first, q.first), mb(p.second, q.second));
    };
    s.map = [fa = a.map, fb = b.map](const P& p) { return P(fa(p.first), fb(p.second)); };
    s.sample = [sa = a.sample, sb = b.sample](Rng& rng) {
        A x = sa(rng);
        B y = sb(rng);
        return P(std::move(x), std::move(y));
    };
    s.perturb = [pa = a.perturb, pb = b.perturb](const P& p, double radius, Rng& rng) {
        A x = pa(p.first, radius, rng);
        B y = pb(p.second, radius, rng);
        return P(std::move(x), std::move(y));
    };
    s.net_size = [na = a.net_size, nb = b.net_size](double r) {
        const std::size_t x = na(r), y = nb(r);
        return y != 0 && x > (kMaxNetSize * 4) / y ? kMaxNetSize * 4 : x * y;
    };
    s.net = [na = a.net, nb = b.net](double r) {
        const auto xs = na(r);
        const auto ys = nb(r);
        std::vector<P> out;
        out.reserve(xs.size() * ys.size());
        for (const auto& x : xs)
            for (const auto& y : ys) out.emplace_back(x, y);
        return out;
    };
    s.min_resolution = std::max(a.min_resolution, b.min_resolution);
    s.format = [fa = a.format, fb = b.format](const P& p) {
        return "(" + fa(p.first) + ";" + fb(p.second) + ")";
    };
    s.parse = [pa = a.parse, pb = b.parse](std::string_view t) {
        if (t.size() < 3 || t.front() != '(' || t.back() != ')')
            throw std::invalid_argument("product point must be '(a;b)'");
        const auto body = t.substr(1, t.size() - 2);
        int depth = 0;
        for (std::size_t i = 0; i < body.size(); ++i) {
            if (body[i] == '(') ++depth;
            else if (body[i] == ')') --depth;
            else if (body[i] == ';' && depth == 0)
                return P(pa(body.substr(0, i)), pb(body.substr(i + 1)));
        }
        throw std::invalid_argument("product point missing top-level ';'");
    };
    return s;
}

/// Same space, map f^k.
template <class P>
System<P> make_power(const System<P>& a, unsigned k) {
    if (k < 1) throw std::invalid_argument("make_power: k must be ≥ 1");
    System<P> s = a;
    if (k == 1) return s;
    s.name = a.name + "^" + std::to_string(k);
    s.map = [f = a.map, k](const P& p) {
        P q = p;
        for (unsigned i = 0; i < k; ++i) q = f(q);
        return q;
    };
    return s;
}

/// A homeomorphism h: X → Y with its inverse and a modulus of continuity ω,
/// d_Y(h p, h q) ≤ ω(d_X(p, q)), ω nondecreasing.
template <class P, class Q>
struct Conjugacy {
    std::function<Q(const P&)> forward;
    std::function<P(const Q&)> inverse;
    std::function<double(double)> modulus;
};

/// g = h ∘ f ∘ h⁻¹ on Y. The metric on Y is the caller's; h is checked by
/// round trips on `checks` samples in both directions.
template <class P, class Q>
System<Q> make_conjugate(const System<P>& a, const Conjugacy<P, Q>& h, std::string name,
                         std::function<double(const Q&, const Q&)> metric_y, double diameter_y,
                         std::function<std::string(const Q&)> format,
                         std::function<Q(std::string_view)> parse, std::size_t checks = 1000,
                         double tolerance = 1e-12, std::uint64_t seed = 1) {
    Rng rng(seed);
    for (std::size_t i = 0; i < checks; ++i) {
        const P p = a.sample(rng);
        const Q q = h.forward(p);
        if (a.metric(h.inverse(q), p) > tolerance)
            throw std::invalid_argument("make_conjugate: h⁻¹(h(p)) ≠ p at sample " + std::to_string(i));
        if (metric_y(h.forward(h.inverse(q)), q) > tolerance)
            throw std::invalid_argument("make_conjugate: h(h⁻¹(q)) ≠ q at sample " + std::to_string(i));
    }
    // Largest ρ ≤ diam(X) with ω(ρ) ≤ r, by bisection.
    auto preimage_radius = [modulus = h.modulus, diam = a.diameter](double r) {
        double lo = 0.0, hi = diam;
        if (modulus(hi) <= r) return hi;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            (modulus(mid) <= r ? lo : hi) = mid;
        }
        return lo;
    };
    System<Q> s;
    s.name = std::move(name);
    s.kind = a.kind;
    s.diameter = diameter_y;
    s.metric = std::move(metric_y);
    s.map = [f = a.map, h](const Q& q) { return h.forward(f(h.inverse(q))); };
    s.sample = [sa = a.sample, fwd = h.forward](Rng& r) { return fwd(sa(r)); };
    s.perturb = [pa = a.perturb, h, preimage_radius](const Q& q, double radius, Rng& r) {
        return h.forward(pa(h.inverse(q), preimage_radius(radius), r));
    };
    s.net_size = [ns = a.net_size, preimage_radius](double r) { return ns(preimage_radius(r)); };
    s.net = [na = a.net, fwd = h.forward, preimage_radius](double r) {
        std::vector<Q> out;
        for (const auto& p : na(preimage_radius(r))) out.push_back(fwd(p));
        return out;
    };
    s.min_resolution = h.modulus(a.min_resolution);
    s.format = std::move(format);
    s.parse = std::move(parse);
    return s;
}

}  // namespace shadowlab
