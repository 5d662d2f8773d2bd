#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bitensor/stress_energy.hpp"
#include "bitensor/submanifold.hpp"

/// Named manifolds, maps and immersions with known closed-form geometry.
namespace bitensor::corpus {

/// Flat chart with the identity metric on a bounded box.
[[nodiscard]] ManifoldPtr flat(std::string name, std::vector<std::string> coords, std::vector<CoordinateRange> domain);

/// Round 2-sphere of radius R in coordinates (theta, phi).
[[nodiscard]] ManifoldPtr round_sphere(double radius = 1.0);

/// Flat torus du² + dv² on [0, 2π)².
[[nodiscard]] ManifoldPtr flat_torus();

/// S²(1/√2) in coordinates (beta, gamma) and the round S³ in (alpha, beta, gamma).
[[nodiscard]] ManifoldPtr small_sphere();
[[nodiscard]] ManifoldPtr round_three_sphere();

/// (R, dt²) restricted to [lo, hi].
[[nodiscard]] ManifoldPtr line(std::string coord, double lo, double hi);

/// dt² + e^{2ct}(dx² + dy²) on [-1, 1]³.
[[nodiscard]] ManifoldPtr warped_product(double c);

/// Seeded perturbation 1 + 0.1·(sine combinations) of the flat metric on [-1, 1]³.
[[nodiscard]] ManifoldPtr perturbed_metric(std::uint64_t seed);

/// S^m(R) ⊂ R^{m+1} in hyperspherical coordinates; for m = 2 the chart is
/// (theta, phi), otherwise (a1, ..., a_{m-1}, phi) with the polar angles
/// restricted to [0.15, π − 0.15].
[[nodiscard]] Immersion sphere(std::size_t m, double radius);
/// (cos u, sin u, cos v, sin v)/√2 ⊂ R⁴.
[[nodiscard]] Immersion clifford_torus();
/// (cos u, sin u, v) ⊂ R³ with v ∈ [-1, 1].
[[nodiscard]] Immersion cylinder();
/// ((a + b cos v) cos u, (a + b cos v) sin u, b sin v) ⊂ R³.
[[nodiscard]] Immersion torus_of_revolution(double a = 2.0, double b = 1.0);
/// Graph of z = x² + y² over [-1, 1]².
[[nodiscard]] Immersion paraboloid();
/// Graph of a seeded random cubic over [-1, 1]².
[[nodiscard]] Immersion random_graph_surface(std::uint64_t seed);

/// (beta, gamma) ↦ (π/4, beta, gamma), S²(1/√2) → S³.
[[nodiscard]] SmoothMap small_sphere_inclusion();
/// (t, x, y) ↦ t.
[[nodiscard]] SmoothMap warped_projection(double c);
/// t ↦ t³ (1, 0) on [0.5, 2].
[[nodiscard]] SmoothMap cubic_curve();
/// Arc-length circle of radius a in R².
[[nodiscard]] SmoothMap circle(double a);
/// (x, y) ↦ (x² − y², 2xy) on [0.2, 1.2]².
[[nodiscard]] SmoothMap holomorphic_square();
[[nodiscard]] SmoothMap identity(const ManifoldPtr& manifold);
[[nodiscard]] SmoothMap constant(const ManifoldPtr& source, const ManifoldPtr& target, const std::vector<double>& value);
/// Seeded polynomial map [-1, 1]² → R³ of degree ≤ 3 with coefficients in [-1, 1].
[[nodiscard]] SmoothMap random_polynomial_map(std::uint64_t seed);

}  // namespace bitensor::corpus
