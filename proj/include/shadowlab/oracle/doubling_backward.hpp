#pragma once

// Validation oracle for the doubling map: the classical expanding-map
// shadowing construction. Walking the pseudo orbit from its far end, each
// step takes the preimage of the current point that lies nearest x_i.
// Preimages halve distances, so the tracer sits within about δ of x_i
// everywhere except a few steps before each junction.
//
// Used as a source of search hints and as an independent check of tracer
// search; it is not a search procedure itself.

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "../binary_angle.hpp"
#include "../pseudo_orbit.hpp"

namespace shadowlab::oracle {

inline BinaryAngle doubling_backward_tracer(const PseudoOrbit<BinaryAngle>& p) {
    const std::size_t n = p.horizon();
    if (n == 0) throw std::invalid_argument("doubling_backward_tracer: empty pseudo orbit");
    const BinaryAngle& last = p.points.back();
    const std::size_t tail = last.precision();
    // bits[0 .. n-2] are the branch choices; the last point's expansion follows.
    std::vector<std::uint8_t> bits(n - 1 + tail);
    for (std::size_t k = 0; k < tail; ++k) bits[n - 1 + k] = static_cast<std::uint8_t>(last.bit(k));

    auto window_from = [&](std::size_t pos) {
        std::uint64_t w = 0;
        for (std::size_t k = 0; k < 64; ++k) {
            const std::size_t q = pos + k;
            w = (w << 1) | (q < bits.size() ? bits[q] : 0u);
        }
        return w;
    };
    auto arc = [](std::uint64_t a, std::uint64_t b) {
        const std::uint64_t d = a - b;
        return d < ~d + 1 ? d : ~d + 1;
    };
    for (std::size_t i = n - 1; i-- > 0;) {
        // Preimages of the point whose expansion starts at bit i + 1.
        const std::uint64_t rest = window_from(i + 1) >> 1;
        const std::uint64_t zero = rest, one = rest | (std::uint64_t{1} << 63);
        const std::uint64_t target = p.points[i].window();
        bits[i] = arc(one, target) < arc(zero, target) ? 1 : 0;
    }
    return BinaryAngle::from_bits(bits);
}

}  // namespace shadowlab::oracle
