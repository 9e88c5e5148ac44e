#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace shadowlab {

/// A point of the circle stored as the binary expansion of its angle in
/// turns, 0.b0 b1 b2 ... Bits past the stored length read as zero.
///
/// Doubling is a one-bit shift, so orbits of the doubling map stay exact for
/// as many steps as there are stored bits. Storage is shared and immutable;
/// doubled() only advances an offset.
class BinaryAngle {
public:
    BinaryAngle() : BinaryAngle(std::uint64_t{0}) {}

    /// turn · 2^64 as a 64-bit fixed-point fraction.
    explicit BinaryAngle(std::uint64_t turn_fixed)
        : words_(std::make_shared<const std::vector<std::uint64_t>>(1, turn_fixed)),
          offset_(0), length_(64) {}

    static BinaryAngle from_radians(double theta) {
        double turns = theta / (2 * std::numbers::pi);
        turns -= std::floor(turns);
        // 2^64 · turns, split to keep the low bits that a direct cast would drop.
        const double hi = std::ldexp(turns, 32);
        const double hi_floor = std::floor(hi);
        const double lo = std::ldexp(hi - hi_floor, 32);
        const auto fixed = (static_cast<std::uint64_t>(hi_floor) << 32) +
                           static_cast<std::uint64_t>(std::llround(lo));
        return BinaryAngle(fixed);
    }

    /// Exact expansion of num/den turns to `bits` binary places.
    static BinaryAngle from_fraction(std::uint64_t num, std::uint64_t den, std::size_t bits) {
        if (den == 0) throw std::invalid_argument("BinaryAngle::from_fraction: zero denominator");
        std::vector<std::uint8_t> out(bits);
        unsigned __int128 r = num % den;
        for (std::size_t k = 0; k < bits; ++k) {
            r *= 2;
            out[k] = r >= den ? 1 : 0;
            if (r >= den) r -= den;
        }
        return from_bits(out);
    }

    /// bits[k] is the coefficient of 2^-(k+1).
    static BinaryAngle from_bits(const std::vector<std::uint8_t>& bits) {
        std::vector<std::uint64_t> words((bits.size() + 63) / 64 + 1, 0);
        for (std::size_t k = 0; k < bits.size(); ++k)
            if (bits[k]) words[k / 64] |= std::uint64_t{1} << (63 - k % 64);
        BinaryAngle a;
        a.words_ = std::make_shared<const std::vector<std::uint64_t>>(std::move(words));
        a.length_ = bits.size();
        return a;
    }

    /// Bit k of the expansion as seen from this point (0 past the end).
    int bit(std::size_t k) const noexcept {
        const std::size_t pos = offset_ + k;
        if (pos >= length_) return 0;
        return static_cast<int>(((*words_)[pos / 64] >> (63 - pos % 64)) & 1u);
    }

    /// Leading 64 bits: the angle in turns as a fixed-point fraction.
    std::uint64_t window() const noexcept { return window_at(0); }

    std::uint64_t window_at(std::size_t k) const noexcept {
        const std::size_t pos = offset_ + k;
        if (pos >= length_) return 0;
        const auto& w = *words_;
        const std::size_t i = pos / 64, s = pos % 64;
        std::uint64_t v = w[i] << s;
        if (s != 0 && i + 1 < w.size()) v |= w[i + 1] >> (64 - s);
        const std::size_t live = length_ - pos;
        if (live < 64) v &= ~std::uint64_t{0} << (64 - live);
        return v;
    }

    double turns() const noexcept { return std::ldexp(static_cast<double>(window()), -64); }
    double radians() const noexcept { return 2 * std::numbers::pi * turns(); }

    /// Number of stored bits still ahead of this point.
    std::size_t precision() const noexcept { return length_ > offset_ ? length_ - offset_ : 0; }

    BinaryAngle doubled() const {
        BinaryAngle a = *this;
        ++a.offset_;
        return a;
    }

    /// Rotation by delta radians. The result carries 64 bits.
    BinaryAngle rotated(double delta) const {
        const double turns_delta = delta / (2 * std::numbers::pi);
        const double scaled = std::ldexp(turns_delta, 64);
        const auto step = static_cast<std::int64_t>(std::llround(scaled));
        return BinaryAngle(window() + static_cast<std::uint64_t>(step));
    }

    /// Preimage under doubling: prepends `top` to the expansion.
    BinaryAngle halved(int top) const {
        std::vector<std::uint8_t> bits(precision() + 1);
        bits[0] = static_cast<std::uint8_t>(top & 1);
        for (std::size_t k = 1; k < bits.size(); ++k) bits[k] = static_cast<std::uint8_t>(bit(k - 1));
        return from_bits(bits);
    }

    /// Arc length in radians on the circle of circumference 2π.
    friend double arc_distance(const BinaryAngle& a, const BinaryAngle& b) noexcept {
        const std::uint64_t d = a.window() - b.window();
        const std::uint64_t m = std::min(d, ~d + 1);
        return 2 * std::numbers::pi * std::ldexp(static_cast<double>(m), -64);
    }

    friend bool operator==(const BinaryAngle& a, const BinaryAngle& b) noexcept {
        const std::size_t n = std::max(a.precision(), b.precision());
        for (std::size_t k = 0; k < n; k += 64)
            if (a.window_at(k) != b.window_at(k)) return false;
        return true;
    }

    /// "b<nbits>:<hex>", exact for every stored bit.
    std::string to_text() const {
        static constexpr char kHex[] = "0123456789abcdef";
        const std::size_t n = precision();
        std::string s = "b" + std::to_string(n) + ":";
        for (std::size_t k = 0; k < n; k += 4) {
            int nib = 0;
            for (std::size_t j = 0; j < 4; ++j) nib = (nib << 1) | bit(k + j);
            s.push_back(kHex[nib]);
        }
        return s;
    }

    static BinaryAngle from_text(std::string_view s) {
        if (s.size() < 3 || s[0] != 'b') throw std::invalid_argument("BinaryAngle: bad text '" + std::string(s) + "'");
        const auto colon = s.find(':');
        if (colon == std::string_view::npos) throw std::invalid_argument("BinaryAngle: missing ':'");
        const std::size_t n = std::stoull(std::string(s.substr(1, colon - 1)));
        const auto hex = s.substr(colon + 1);
        if (hex.size() != (n + 3) / 4) throw std::invalid_argument("BinaryAngle: hex length mismatch");
        std::vector<std::uint8_t> bits(n);
        for (std::size_t i = 0; i < hex.size(); ++i) {
            const char c = hex[i];
            int v = c >= '0' && c <= '9' ? c - '0' : c >= 'a' && c <= 'f' ? c - 'a' + 10 : -1;
            if (v < 0) throw std::invalid_argument("BinaryAngle: bad hex digit");
            for (int j = 0; j < 4; ++j) {
                const std::size_t k = 4 * i + static_cast<std::size_t>(j);
                if (k < n) bits[k] = static_cast<std::uint8_t>((v >> (3 - j)) & 1);
            }
        }
        return from_bits(bits);
    }

private:
    std::shared_ptr<const std::vector<std::uint64_t>> words_;
    std::size_t offset_ = 0;
    std::size_t length_ = 0;
};

}  // namespace shadowlab
