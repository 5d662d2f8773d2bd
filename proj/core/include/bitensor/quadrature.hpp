#pragma once

#include <functional>
#include <span>
#include <vector>

#include "bitensor/submanifold.hpp"

namespace bitensor {

enum class QuadratureRule { PeriodicTrapezoid, GaussLegendre };

/// Nodes and weights along one coordinate. For a polar coordinate the
/// Gauss-Legendre rule runs in cos(angle) and the weights already carry
/// the Jacobian 1/sin(angle).
struct QuadratureAxis {
  std::vector<double> nodes;
  std::vector<double> weights;
  QuadratureRule rule = QuadratureRule::GaussLegendre;
};

struct Grid {
  std::vector<QuadratureAxis> axes;
  [[nodiscard]] std::size_t node_count() const noexcept;
};

inline constexpr std::size_t kDefaultPeriodicNodes = 64;
inline constexpr std::size_t kDefaultGaussNodes = 48;

/// n-point Gauss-Legendre rule on [lo, hi].
[[nodiscard]] QuadratureAxis gauss_legendre(std::size_t n, double lo, double hi);
/// n-point trapezoid rule on the period [lo, hi).
[[nodiscard]] QuadratureAxis periodic_trapezoid(std::size_t n, double lo, double hi);

/// Tensor-product grid over the chart domain. `sizes` gives nodes per
/// coordinate; an empty span selects the defaults, a single entry applies
/// to every coordinate.
[[nodiscard]] Grid make_grid(const ChartedManifold& manifold, std::span<const std::size_t> sizes = {});

using ScalarField = std::function<double(std::span<const double>)>;

/// Σ w_p f(p) sqrt(det g(p)), reduced pairwise in node order. Throws
/// std::domain_error when f is not finite at a node.
[[nodiscard]] double integrate_on(const ChartedManifold& manifold, const Grid& grid, const ScalarField& f);

struct IntegralResult {
  double value = 0.0;    // base grid
  double refined = 0.0;  // every node count doubled
  double change = 0.0;   // |refined − value|
  std::size_t nodes = 0;
};

[[nodiscard]] IntegralResult integrate(const ChartedManifold& manifold, const ScalarField& f,
                                       std::span<const std::size_t> sizes = {});

inline constexpr double kEulerRoundingGap = 0.01;

struct EulerCharacteristic {
  int chi = 0;
  double raw = 0.0;  // (1/2π) ∫ K v_g
};

/// Throws GeometryError when the raw value is 0.01 or more away from an integer.
[[nodiscard]] EulerCharacteristic euler_characteristic(const Immersion& imm, std::span<const std::size_t> sizes = {});

}  // namespace bitensor
