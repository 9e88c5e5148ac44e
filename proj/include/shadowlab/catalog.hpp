#pragma once

// Systems addressable by name, for config files and the command line.

#include <charconv>
#include <string>
#include <string_view>
#include <vector>

#include "system.hpp"

namespace shadowlab {

struct CatalogEntry {
    std::string name;
    std::string description;
};

inline const std::vector<CatalogEntry>& system_catalog() {
    static const std::vector<CatalogEntry> entries{
        {"interval-isometry", "[0,1], f(x) = 1 - x"},
        {"constant-interval", "[0,1], f(x) = 1/2"},
        {"interval-identity", "[0,1], f(x) = x"},
        {"doubling-circle", "circle, θ ↦ 2θ, arc metric"},
        {"full-shift-<k>", "one-sided shift on k symbols, 2 ≤ k ≤ 36"},
        {"two-circles", "two circles, (i, θ) ↦ (3 - i, 2θ)"},
        {"cantor-identity", "2-symbol sequence space, identity map"},
    };
    return entries;
}

class UnknownSystem : public std::invalid_argument {
public:
    explicit UnknownSystem(const std::string& name) : std::invalid_argument("unknown system '" + name + "'") {}
};

/// Calls visit(system) with the named system. Symbolic systems use
/// `working_length` symbols per point.
template <class Visitor>
decltype(auto) visit_system(std::string_view name, std::size_t working_length, Visitor&& visit) {
    if (name == "interval-isometry") return visit(make_interval_isometry());
    if (name == "constant-interval") return visit(make_constant_map());
    if (name == "interval-identity") return visit(make_interval_identity());
    if (name == "doubling-circle") return visit(make_doubling_circle());
    if (name == "two-circles") return visit(make_two_circles_swap_double());
    if (name == "cantor-identity") return visit(make_cantor_identity(working_length));
    constexpr std::string_view prefix = "full-shift-";
    if (name.starts_with(prefix)) {
        unsigned k = 0;
        const auto digits = name.substr(prefix.size());
        const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), k);
        if (ec == std::errc{} && ptr == digits.data() + digits.size() && k >= 2 && k <= 36)
            return visit(make_full_shift(k, working_length));
    }
    throw UnknownSystem(std::string(name));
}

}  // namespace shadowlab
