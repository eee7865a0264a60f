#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <ostream>

namespace glmb {

/// Track identity: the scan a track was born at plus the index of the birth
/// term that produced it. Ordered lexicographically.
struct Label {
    std::int32_t birth_time = 0;
    std::int32_t birth_index = 0;

    friend constexpr auto operator<=>(const Label&, const Label&) = default;
};

inline std::ostream& operator<<(std::ostream& os, const Label& l) {
    return os << '(' << l.birth_time << ',' << l.birth_index << ')';
}

}  // namespace glmb

template <>
struct std::hash<glmb::Label> {
    std::size_t operator()(const glmb::Label& l) const noexcept {
        return std::hash<std::uint64_t>{}(
            (static_cast<std::uint64_t>(static_cast<std::uint32_t>(l.birth_time)) << 32) |
            static_cast<std::uint32_t>(l.birth_index));
    }
};
