#pragma once

// Finite index sets standing in for subsets of the naturals, with exact
// density arithmetic and the two inequalities that tie Cesaro means of an
// error sequence to the density of its bad set.

#include <algorithm>
#include <compare>
#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace shadowlab {

/// Exact rational with 64-bit numerator and denominator, kept in lowest terms.
class Rational {
public:
    constexpr Rational() = default;
    Rational(std::int64_t num, std::int64_t den) : num_(num), den_(den) {
        if (den_ == 0) throw std::domain_error("Rational: zero denominator");
        if (den_ < 0) { num_ = -num_; den_ = -den_; }
        auto g = std::gcd(num_ < 0 ? -num_ : num_, den_);
        if (g > 1) { num_ /= g; den_ /= g; }
    }
    static Rational integer(std::int64_t v) { return Rational(v, 1); }

    std::int64_t num() const noexcept { return num_; }
    std::int64_t den() const noexcept { return den_; }
    double to_double() const noexcept {
        return static_cast<double>(num_) / static_cast<double>(den_);
    }
    std::string str() const { return std::to_string(num_) + "/" + std::to_string(den_); }

    friend bool operator==(const Rational& a, const Rational& b) noexcept {
        return a.num_ == b.num_ && a.den_ == b.den_;
    }
    friend std::strong_ordering operator<=>(const Rational& a, const Rational& b) noexcept {
        const __int128 lhs = static_cast<__int128>(a.num_) * b.den_;
        const __int128 rhs = static_cast<__int128>(b.num_) * a.den_;
        if (lhs < rhs) return std::strong_ordering::less;
        if (lhs > rhs) return std::strong_ordering::greater;
        return std::strong_ordering::equal;
    }
    friend Rational operator+(const Rational& a, const Rational& b) {
        return Rational(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
    }
    friend Rational operator-(const Rational& a, const Rational& b) {
        return Rational(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
    }
    friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

    /// True iff num/den < x, decided without rounding the rational first.
    bool less_than(double x) const noexcept {
        return static_cast<long double>(num_) < static_cast<long double>(x) * den_;
    }
    bool greater_than(double x) const noexcept {
        return static_cast<long double>(num_) > static_cast<long double>(x) * den_;
    }

private:
    std::int64_t num_ = 0;
    std::int64_t den_ = 1;
};

/// Finite subset of [0, horizon). Members are kept sorted and unique.
class IndexSet {
public:
    explicit IndexSet(std::size_t horizon) : horizon_(horizon) {
        if (horizon == 0) throw std::invalid_argument("IndexSet: horizon must be positive");
    }
    IndexSet(std::size_t horizon, std::vector<std::size_t> members)
        : IndexSet(horizon) {
        std::sort(members.begin(), members.end());
        members.erase(std::unique(members.begin(), members.end()), members.end());
        if (!members.empty() && members.back() >= horizon)
            throw std::out_of_range("IndexSet: member " + std::to_string(members.back()) +
                                    " outside [0, " + std::to_string(horizon) + ")");
        members_ = std::move(members);
    }
    IndexSet(std::size_t horizon, std::initializer_list<std::size_t> members)
        : IndexSet(horizon, std::vector<std::size_t>(members)) {}

    /// {i < horizon : pred(i)}.
    template <class Pred>
    static IndexSet where(std::size_t horizon, Pred&& pred) {
        IndexSet out(horizon);
        for (std::size_t i = 0; i < horizon; ++i)
            if (pred(i)) out.members_.push_back(i);
        return out;
    }

    std::size_t horizon() const noexcept { return horizon_; }
    const std::vector<std::size_t>& members() const noexcept { return members_; }
    std::size_t size() const noexcept { return members_.size(); }
    bool empty() const noexcept { return members_.empty(); }
    bool contains(std::size_t i) const {
        return std::binary_search(members_.begin(), members_.end(), i);
    }

    /// #(members ∩ [0, n)).
    std::size_t count_below(std::size_t n) const {
        return static_cast<std::size_t>(
            std::lower_bound(members_.begin(), members_.end(), n) - members_.begin());
    }

    IndexSet complement() const {
        IndexSet out(horizon_);
        out.members_.reserve(horizon_ - members_.size());
        std::size_t k = 0;
        for (std::size_t i = 0; i < horizon_; ++i) {
            if (k < members_.size() && members_[k] == i) { ++k; continue; }
            out.members_.push_back(i);
        }
        return out;
    }

    friend IndexSet set_union(const IndexSet& a, const IndexSet& b) {
        if (a.horizon_ != b.horizon_) throw std::invalid_argument("set_union: horizon mismatch");
        IndexSet out(a.horizon_);
        std::set_union(a.members_.begin(), a.members_.end(), b.members_.begin(), b.members_.end(),
                       std::back_inserter(out.members_));
        return out;
    }

    friend bool operator==(const IndexSet&, const IndexSet&) = default;

private:
    std::size_t horizon_;
    std::vector<std::size_t> members_;
};

/// Tail-window density estimates; see density_profile.
struct DensityProfile {
    std::size_t horizon = 0;
    Rational value_at_full_horizon;
    Rational upper_estimate;
    Rational lower_estimate;
    Rational tail_fraction;
};

inline const Rational kDefaultTailFraction{1, 4};

/// #(E ∩ [0, n-1]) / n.
inline Rational density_at(const IndexSet& e, std::size_t n) {
    if (n < 1 || n > e.horizon())
        throw std::out_of_range("density_at: n = " + std::to_string(n) + " outside [1, " +
                                std::to_string(e.horizon()) + "]");
    return Rational(static_cast<std::int64_t>(e.count_below(n)), static_cast<std::int64_t>(n));
}

/// First window endpoint of the tail: the tail is the last ceil(tf·N)
/// endpoints n ∈ [N - ceil(tf·N) + 1, N].
inline std::size_t tail_start(std::size_t horizon, const Rational& tail_fraction) {
    if (tail_fraction.num() <= 0 || tail_fraction > Rational::integer(1))
        throw std::invalid_argument("tail_fraction must lie in (0, 1], got " + tail_fraction.str());
    const auto n = static_cast<__int128>(horizon);
    const auto len = static_cast<std::size_t>((tail_fraction.num() * n + tail_fraction.den() - 1) /
                                              tail_fraction.den());
    return horizon - std::max<std::size_t>(len, 1) + 1;
}

inline DensityProfile density_profile(const IndexSet& e,
                                      const Rational& tail_fraction = kDefaultTailFraction) {
    const std::size_t horizon = e.horizon();
    const std::size_t first = tail_start(horizon, tail_fraction);
    DensityProfile p;
    p.horizon = horizon;
    p.tail_fraction = tail_fraction;
    p.value_at_full_horizon = density_at(e, horizon);

    // Sweep the endpoints once; count tracks #(E ∩ [0, n)).
    std::size_t count = e.count_below(first);
    const auto& m = e.members();
    auto it = std::lower_bound(m.begin(), m.end(), first);
    bool seeded = false;
    for (std::size_t n = first; n <= horizon; ++n) {
        Rational r(static_cast<std::int64_t>(count), static_cast<std::int64_t>(n));
        if (!seeded) {
            p.upper_estimate = p.lower_estimate = r;
            seeded = true;
        } else {
            if (r > p.upper_estimate) p.upper_estimate = r;
            if (r < p.lower_estimate) p.lower_estimate = r;
        }
        if (it != m.end() && *it == n) { ++count; ++it; }
    }
    return p;
}

/// Every gap, including 0 → first member and last member → horizon - 1, is
/// at most gap_bound. The empty set is never syndetic.
inline bool is_syndetic(const IndexSet& e, std::size_t gap_bound) {
    if (e.empty()) return false;
    const auto& m = e.members();
    if (m.front() > gap_bound) return false;
    for (std::size_t k = 1; k < m.size(); ++k)
        if (m[k] - m[k - 1] > gap_bound) return false;
    return (e.horizon() - 1) - m.back() <= gap_bound;
}

/// Largest gap as measured by is_syndetic; horizon for the empty set.
inline std::size_t max_gap(const IndexSet& e) {
    if (e.empty()) return e.horizon();
    const auto& m = e.members();
    std::size_t g = std::max(m.front(), (e.horizon() - 1) - m.back());
    for (std::size_t k = 1; k < m.size(); ++k) g = std::max(g, m[k] - m[k - 1]);
    return g;
}

/// {i : errors[i] >= threshold} over [0, errors.size()).
inline IndexSet threshold_set(std::span<const double> errors, double threshold) {
    if (errors.empty()) throw std::invalid_argument("threshold_set: empty error sequence");
    return IndexSet::where(errors.size(), [&](std::size_t i) { return errors[i] >= threshold; });
}

inline long double mean_of(std::span<const double> errors) {
    long double s = 0;
    for (double e : errors) s += e;
    return s / static_cast<long double>(errors.size());
}

struct MarkovBound {
    double mean = 0;
    IndexSet bad_set{1};
};

/// Mean of the sequence and its epsilon-bad set. Whenever mean < epsilon², the
/// bad set has density < epsilon at the full horizon (Markov).
inline MarkovBound markov_density_bound(std::span<const double> errors, double epsilon) {
    if (errors.empty()) throw std::invalid_argument("markov_density_bound: empty error sequence");
    if (!(epsilon > 0)) throw std::invalid_argument("markov_density_bound: epsilon must be positive");
    return {static_cast<double>(mean_of(errors)), threshold_set(errors, epsilon)};
}

/// diameter · density(bad_set(eta)) + eta, an upper bound on the mean of any
/// sequence bounded by diameter.
inline double bounded_mean_from_density(std::span<const double> errors, double eta,
                                        double diameter) {
    if (errors.empty()) throw std::invalid_argument("bounded_mean_from_density: empty error sequence");
    if (!(eta > 0)) throw std::invalid_argument("bounded_mean_from_density: eta must be positive");
    for (double e : errors)
        if (e > diameter)
            throw std::domain_error("bounded_mean_from_density: error " + std::to_string(e) +
                                    " exceeds diameter " + std::to_string(diameter));
    const auto bad = threshold_set(errors, eta);
    const long double dens = static_cast<long double>(bad.size()) / errors.size();
    return static_cast<double>(diameter * dens + eta);
}

}  // namespace shadowlab
