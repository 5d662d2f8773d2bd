#include "bitensor/sampling.hpp"

#include <array>
#include <cmath>

#include "bitensor/errors.hpp"

namespace bitensor {

namespace {

constexpr std::array<unsigned, 8> kPrimes{2, 3, 5, 7, 11, 13, 17, 19};

double radical_inverse(std::uint64_t index, unsigned base) {
  double result = 0.0;
  double f = 1.0 / base;
  while (index > 0) {
    result += f * static_cast<double>(index % base);
    index /= base;
    f /= base;
  }
  return result;
}

}  // namespace

double unit_interval(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::vector<std::vector<double>> sample_points(const ChartedManifold& manifold, std::size_t count,
                                               std::uint64_t seed) {
  const std::size_t m = manifold.dimension();
  if (m > kPrimes.size()) throw DimensionMismatch("sample_points supports at most 8 coordinates");
  std::mt19937_64 rng(seed);
  std::vector<double> shift(m);
  for (double& s : shift) s = unit_interval(rng);

  std::vector<std::vector<double>> points;
  points.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    std::vector<double> p(m);
    for (std::size_t c = 0; c < m; ++c) {
      double u = radical_inverse(k + 1, kPrimes[c]) + shift[c];
      u -= std::floor(u);
      const CoordinateRange& r = manifold.domain()[c];
      double lo = r.lo, hi = r.hi;
      if (!std::isfinite(lo) || !std::isfinite(hi)) {
        lo = -1.0;
        hi = 1.0;
      } else if (!r.periodic()) {
        lo += kBoundaryMargin;
        hi -= kBoundaryMargin;
      }
      p[c] = lo + (hi - lo) * u;
    }
    points.push_back(std::move(p));
  }
  return points;
}

}  // namespace bitensor
