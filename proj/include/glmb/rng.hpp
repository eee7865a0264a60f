#pragma once

#include "glmb/association.hpp"

#include <cstdint>
#include <initializer_list>
#include <random>

namespace glmb {

using Rng = std::mt19937_64;

/// Uniform double in [0, 1) from the top 53 bits of one draw.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Derives an independent stream seed from a master seed and a path of
/// indices (e.g. scan, component).
inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
    std::uint64_t h = detail::mix64(master);
    for (std::uint64_t p : path) h = detail::mix64(h ^ detail::mix64(p + 0x632be59bd9b4e019ULL));
    return h;
}

}  // namespace glmb
