#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace shadowlab {

/// A one-sided sequence over {0, ..., alphabet-1} truncated to a fixed
/// working length L. Positions past the stored symbols read as the padding
/// symbol 0, which is what the truncated shift appends.
class SymbolPoint {
public:
    SymbolPoint() = default;

    SymbolPoint(std::vector<std::uint8_t> symbols, unsigned alphabet, std::size_t length)
        : alphabet_(alphabet), length_(length) {
        if (alphabet < 2 || alphabet > 36) throw std::invalid_argument("SymbolPoint: alphabet must be in [2, 36]");
        if (length == 0) throw std::invalid_argument("SymbolPoint: working length must be positive");
        if (symbols.size() > length) symbols.resize(length);
        for (auto s : symbols)
            if (s >= alphabet) throw std::out_of_range("SymbolPoint: symbol outside alphabet");
        end_ = symbols.size();
        data_ = std::make_shared<const std::vector<std::uint8_t>>(std::move(symbols));
    }

    static SymbolPoint constant(std::uint8_t symbol, unsigned alphabet, std::size_t length) {
        return SymbolPoint(std::vector<std::uint8_t>(length, symbol), alphabet, length);
    }

    unsigned alphabet() const noexcept { return alphabet_; }
    std::size_t length() const noexcept { return length_; }
    /// Symbols still backed by storage; the rest of the working length is padding.
    std::size_t stored() const noexcept { return end_ - begin_; }

    std::uint8_t operator[](std::size_t i) const noexcept {
        const std::size_t pos = begin_ + i;
        return pos < end_ && i < length_ ? (*data_)[pos] : std::uint8_t{0};
    }

    /// Drops the first symbol; a padding 0 enters at the back.
    SymbolPoint shifted() const {
        SymbolPoint p = *this;
        if (p.begin_ < p.end_) ++p.begin_;
        return p;
    }

    std::vector<std::uint8_t> symbols() const {
        std::vector<std::uint8_t> out(length_);
        for (std::size_t i = 0; i < length_; ++i) out[i] = (*this)[i];
        return out;
    }

    /// First index in [0, L) where the sequences differ, or L if none.
    friend std::size_t first_difference(const SymbolPoint& a, const SymbolPoint& b) {
        const std::size_t len = std::min(a.length_, b.length_);
        const std::size_t common = std::min({a.stored(), b.stored(), len});
        const auto* pa = a.data_->data() + a.begin_;
        const auto* pb = b.data_->data() + b.begin_;
        const auto mm = std::mismatch(pa, pa + common, pb);
        if (mm.first != pa + common) return static_cast<std::size_t>(mm.first - pa);
        // Past the shorter stored run the other sequence must be all padding.
        const SymbolPoint& longer = a.stored() > b.stored() ? a : b;
        const std::size_t stop = std::min(longer.stored(), len);
        const auto* pl = longer.data_->data() + longer.begin_;
        const auto* nz = std::find_if(pl + common, pl + stop, [](std::uint8_t s) { return s != 0; });
        return nz == pl + stop ? len : static_cast<std::size_t>(nz - pl);
    }

    /// Σ_{i<L} [x_i ≠ y_i] 2^-(i+1). Terms more than 64 places after the first
    /// difference are below double resolution and are not summed.
    friend double cylinder_distance(const SymbolPoint& a, const SymbolPoint& b) {
        const std::size_t len = std::min(a.length_, b.length_);
        const std::size_t k = first_difference(a, b);
        if (k >= len) return 0.0;
        double d = 0.0;
        const std::size_t stop = std::min(len, k + 64);
        for (std::size_t i = stop; i-- > k;)
            if (a[i] != b[i]) d += std::ldexp(1.0, -static_cast<int>(i + 1));
        return d;
    }

    friend bool operator==(const SymbolPoint& a, const SymbolPoint& b) {
        return a.alphabet_ == b.alphabet_ && a.length_ == b.length_ &&
               first_difference(a, b) >= a.length_;
    }

    /// Stored symbols as base-36 digits; padding is implied.
    std::string to_text() const {
        std::string s;
        s.reserve(stored());
        for (std::size_t i = 0; i < std::min(stored(), length_); ++i) {
            const auto v = (*this)[i];
            s.push_back(static_cast<char>(v < 10 ? '0' + v : 'a' + (v - 10)));
        }
        return s;
    }

    static SymbolPoint from_text(std::string_view s, unsigned alphabet, std::size_t length) {
        std::vector<std::uint8_t> out;
        out.reserve(s.size());
        for (char c : s) {
            int v = c >= '0' && c <= '9' ? c - '0' : c >= 'a' && c <= 'z' ? c - 'a' + 10 : -1;
            if (v < 0) throw std::invalid_argument("SymbolPoint: bad symbol character");
            out.push_back(static_cast<std::uint8_t>(v));
        }
        return SymbolPoint(std::move(out), alphabet, length);
    }

private:
    std::shared_ptr<const std::vector<std::uint8_t>> data_ =
        std::make_shared<const std::vector<std::uint8_t>>();
    std::size_t begin_ = 0;
    std::size_t end_ = 0;
    unsigned alphabet_ = 2;
    std::size_t length_ = 1;
};

}  // namespace shadowlab
