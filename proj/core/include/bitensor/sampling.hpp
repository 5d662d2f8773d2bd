#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "bitensor/manifold.hpp"

namespace bitensor {

/// Uniform double in [0, 1) from the top 53 bits of one engine output.
/// Unlike std::uniform_real_distribution the result is the same on every
/// standard library.
[[nodiscard]] double unit_interval(std::mt19937_64& rng);

/// `count` interior points from a Halton sequence with a seeded
/// Cranley-Patterson shift. Non-periodic coordinates keep the boundary
/// margin; unbounded coordinates are sampled in [-1, 1].
[[nodiscard]] std::vector<std::vector<double>> sample_points(const ChartedManifold& manifold, std::size_t count,
                                                             std::uint64_t seed);

}  // namespace bitensor
