#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "bitensor/manifold.hpp"

namespace bitensor {

/// Pointwise first- and higher-order data of a map φ: (M, g) → (N, h).
///
/// Index order: dphi(α, i) = ∂_i φ^α, nabla_dphi(α, i, j) = (∇dφ)^α_ij,
/// nabla_tau(α, i) = (∇^φ_{∂_i} τ)^α.
struct MapPointData {
  std::vector<double> point;
  std::vector<double> image;
  RealTensor dphi;
  double energy_density = 0.0;
  RealTensor pullback_metric;
  RealTensor target_metric;  // h_αβ at φ(p)
  RealTensor nabla_dphi;
  std::vector<double> tau;
  RealTensor nabla_tau;
  std::vector<double> tau2;
};

enum class TargetPath {
  Automatic,  // flat targets skip the target connection and curvature
  General,    // always compose ^NΓ with φ and evaluate R^N at φ(p)
};

/// A smooth map between charted manifolds, given by target-coordinate
/// components in the source coordinates.
///
/// The tension field τ, the pullback derivative ∇τ and its partials are
/// built symbolically at construction; τ₂ is assembled pointwise from them
/// with the target curvature evaluated at φ(p).
class SmoothMap {
 public:
  SmoothMap(std::string name, ManifoldPtr source, ManifoldPtr target, std::vector<Expr> components,
            TargetPath path = TargetPath::Automatic);

  [[nodiscard]] const std::string& name() const noexcept { return name_; }
  [[nodiscard]] const ChartedManifold& source() const noexcept { return *source_; }
  [[nodiscard]] const ChartedManifold& target() const noexcept { return *target_; }
  [[nodiscard]] const ManifoldPtr& source_ptr() const noexcept { return source_; }
  [[nodiscard]] const ManifoldPtr& target_ptr() const noexcept { return target_; }
  [[nodiscard]] const std::vector<Expr>& components() const noexcept { return components_; }
  [[nodiscard]] TargetPath path() const noexcept { return path_; }
  [[nodiscard]] bool uses_flat_target() const noexcept { return flat_target_; }

  /// Symbolic fields over the source coordinates.
  [[nodiscard]] const ExprTensor& differential() const noexcept { return dphi_; }          // (α, i)
  [[nodiscard]] const ExprTensor& target_metric_along() const noexcept { return h_; }      // (α, β)
  [[nodiscard]] const ExprTensor& second_fundamental() const noexcept { return nabla_dphi_; }  // (α, i, j)
  [[nodiscard]] const std::vector<Expr>& tension_field() const noexcept { return tau_; }
  [[nodiscard]] const ExprTensor& tension_derivative() const noexcept { return nabla_tau_; }  // (α, i)
  [[nodiscard]] const Expr& energy_density_field() const noexcept { return energy_; }
  [[nodiscard]] const ExprTensor& pullback_metric_field() const noexcept { return pullback_; }

  /// Same components and target, new source manifold (same coordinates).
  [[nodiscard]] SmoothMap with_source(ManifoldPtr source, std::string name) const;

  /// All pointwise data at `p`, including τ₂. Throws DomainViolation when
  /// p or φ(p) leaves the declared domains.
  [[nodiscard]] MapPointData evaluate(std::span<const double> p) const;

 private:
  std::string name_;
  ManifoldPtr source_;
  ManifoldPtr target_;
  std::vector<Expr> components_;
  TargetPath path_;
  bool flat_target_ = false;

  ExprTensor dphi_;
  ExprTensor h_;
  ExprTensor target_christoffel_;  // (α, β, γ) composed with φ
  ExprTensor nabla_dphi_;
  std::vector<Expr> tau_;
  ExprTensor nabla_tau_;
  ExprTensor d_nabla_tau_;  // (α, i, j) = ∂_j (∇_i τ)^α
  Expr energy_;
  ExprTensor pullback_;
  Program program_;
};

/// Tension field τ(φ) at p.
[[nodiscard]] std::vector<double> tension(const SmoothMap& phi, std::span<const double> p);
/// Bitension field τ₂(φ) = −Δτ − trace R^N(dφ, τ)dφ at p.
[[nodiscard]] std::vector<double> bitension(const SmoothMap& phi, std::span<const double> p);

/// h-inner product of two target vectors.
[[nodiscard]] double target_inner(const RealTensor& h, std::span<const double> a, std::span<const double> b);
[[nodiscard]] double target_norm(const RealTensor& h, std::span<const double> a);

/// Column i of an (n × m) tensor as a vector.
[[nodiscard]] std::vector<double> column(const RealTensor& t, std::size_t i);

}  // namespace bitensor
