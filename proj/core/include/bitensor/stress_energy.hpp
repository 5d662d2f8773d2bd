#pragma once

#include <span>
#include <vector>

#include "bitensor/smooth_map.hpp"

namespace bitensor {

struct StressTensors {
  RealTensor S;
  RealTensor S2;
  std::vector<double> div_S;
  std::vector<double> div_S2;
  std::vector<double> tau_pairing;   // ⟨τ, dφ(∂_i)⟩
  std::vector<double> tau2_pairing;  // ⟨τ₂, dφ(∂_i)⟩
};

/// Stress-energy tensors of a map, kept as symbolic fields so their
/// divergences are exact:
///
///     S   = e(φ) g − φ*h
///     S₂  = (½|τ|² + ⟨dφ, ∇τ⟩) g − ⟨dφ(·), ∇_· τ⟩ − ⟨dφ(·), ∇_· τ⟩ᵀ
class StressEnergy {
 public:
  explicit StressEnergy(SmoothMap map);

  [[nodiscard]] const SmoothMap& map() const noexcept { return map_; }
  [[nodiscard]] const ExprTensor& stress_field() const noexcept { return s_; }
  [[nodiscard]] const ExprTensor& bistress_field() const noexcept { return s2_; }

  [[nodiscard]] StressTensors evaluate(std::span<const double> p) const;
  /// Same, reusing map data already computed at p.
  [[nodiscard]] StressTensors evaluate(const MapPointData& data) const;

 private:
  SmoothMap map_;
  ExprTensor s_;
  ExprTensor s2_;
  Program program_;
};

/// S and Div S at p.
[[nodiscard]] StressTensors stress_S(const SmoothMap& phi, std::span<const double> p);
/// S₂ and Div S₂ at p (the returned struct carries both tensors).
[[nodiscard]] StressTensors stress_S2(const SmoothMap& phi, std::span<const double> p);

struct DivIdentityResiduals {
  double stress = 0.0;    // max |Div S(∂_i) + ⟨τ, dφ(∂_i)⟩|
  double bistress = 0.0;  // max |Div S₂(∂_i) + ⟨τ₂, dφ(∂_i)⟩|
  std::size_t points = 0;
};

[[nodiscard]] DivIdentityResiduals check_div_identities(const StressEnergy& stress,
                                                        std::span<const std::vector<double>> points);
[[nodiscard]] DivIdentityResiduals check_div_identities(const SmoothMap& phi,
                                                        std::span<const std::vector<double>> points);

/// Best constant λ with T ≈ λ g at one point: λ = ⟨T, g⟩ / ⟨g, g⟩, and the
/// norm of what is left over.
struct LambdaFit {
  double lambda = 0.0;
  double residual = 0.0;
};
[[nodiscard]] LambdaFit fit_lambda(const PointEval& pe, const RealTensor& t);

struct TransformPair {
  RealTensor original;
  RealTensor transformed;
};

/// S₂ with source metric g and with t·g (t > 0), at each point.
[[nodiscard]] std::vector<TransformPair> homothety_transform(const SmoothMap& phi, double t,
                                                             std::span<const std::vector<double>> points);
[[nodiscard]] TransformPair homothety_transform(const SmoothMap& phi, double t, std::span<const double> p);

struct ConformalPair {
  RealTensor original;
  RealTensor transformed;
  double factor = 1.0;               // e^{−2ρ(p)}
  double hypothesis_residual = 0.0;  // max_i |⟨τ, dφ(∂_i)⟩|
  bool hypothesis_holds = true;      // residual <= 1e-9
};

inline constexpr double kOrthogonalityTolerance = 1e-9;

/// S₂ with source metric g and with e^{2ρ} g on a surface, at each point.
[[nodiscard]] std::vector<ConformalPair> conformal_surface_transform(const SmoothMap& phi, const Expr& rho,
                                                                     std::span<const std::vector<double>> points);
[[nodiscard]] ConformalPair conformal_surface_transform(const SmoothMap& phi, const Expr& rho,
                                                        std::span<const double> p);

}  // namespace bitensor
