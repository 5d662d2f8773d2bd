#pragma once

#include <span>
#include <string>
#include <vector>

#include "bitensor/stress_energy.hpp"

namespace bitensor {

/// Pointwise extrinsic data of an immersion M^m → R^n. Ambient vectors are
/// in the standard basis of R^n; b(α, i, j) is the α-component of B(∂_i, ∂_j).
struct SubmanifoldPointData {
  std::vector<double> point;
  std::vector<double> position;
  RealTensor jacobian;  // (α, i)
  RealTensor g;
  RealTensor g_inv;
  RealTensor normal_projector;  // n × n, I − J (JᵀJ)⁻¹ Jᵀ
  RealTensor B;                 // (α, i, j)
  std::vector<double> H;
  double H_norm_sq = 0.0;
  RealTensor HdotB;                    // ⟨H, B_ij⟩
  RealTensor pseudo_umbilic_residual;  // |H|² g − ⟨H, B⟩
  RealTensor S_traceless;              // B − H ⊗ g, (α, i, j)
  RealTensor nabla_perp_H;             // (α, i), normal part of ∂_i H
  RealTensor ricci;
  double scalar = 0.0;
  RealTensor gauss_pullback;  // G* g_can = m⟨H, B⟩ − ricci
  double gauss_energy = 0.0;  // ½ g^ij (G* g_can)_ij
  RealTensor S_G;             // e(G) g − G* g_can
  std::vector<double> willmore_gradient;  // surfaces only
};

/// A Riemannian immersion into flat R^n, wrapping the inclusion as a
/// SmoothMap so that τ, τ₂ and S₂ come from the same machinery.
class Immersion {
 public:
  /// `source` carries the metric used for all intrinsic quantities; it must
  /// agree with the metric induced by `embedding` (checked on a grid).
  Immersion(std::string name, ManifoldPtr source, std::vector<Expr> embedding);

  /// Source metric built symbolically as JᵀJ.
  [[nodiscard]] static Immersion induced(std::string name, std::vector<std::string> coords,
                                         std::vector<CoordinateRange> domain, std::vector<Expr> embedding);

  [[nodiscard]] const std::string& name() const noexcept { return name_; }
  [[nodiscard]] const ChartedManifold& source() const noexcept { return inclusion_.source(); }
  [[nodiscard]] const SmoothMap& inclusion() const noexcept { return inclusion_; }
  [[nodiscard]] const std::vector<Expr>& embedding() const noexcept { return inclusion_.components(); }
  [[nodiscard]] std::size_t dimension() const noexcept { return inclusion_.source().dimension(); }
  [[nodiscard]] std::size_t ambient_dimension() const noexcept { return inclusion_.target().dimension(); }

  [[nodiscard]] const std::vector<Expr>& mean_curvature_field() const noexcept { return h_field_; }
  [[nodiscard]] const ExprTensor& gauss_stress_field() const noexcept { return sg_field_; }

  /// Symbolic normal projection W − J g⁻¹ Jᵀ W of an ambient vector field.
  [[nodiscard]] std::vector<Expr> normal_projection(std::span<const Expr> ambient) const;

  /// Throws ImmersionFailure on rank deficit or when the source metric
  /// differs from the induced one at p.
  [[nodiscard]] SubmanifoldPointData evaluate(std::span<const double> p) const;

  /// Div S^G and d(|τ(i)|²) at p.
  void gauss_divergence(std::span<const double> p, std::vector<double>& div_sg, std::vector<double>& d_tau_sq) const;

 private:
  void build();
  void check_induced_metric() const;

  std::string name_;
  SmoothMap inclusion_;
  std::vector<Expr> h_field_;
  ExprTensor sg_field_;
  Expr tau_sq_;
  Program program_;
  Program divergence_program_;
};

/// fundamental_forms, gauss_formula and ruh_vilms_residual read their
/// outputs from one SubmanifoldPointData.
[[nodiscard]] SubmanifoldPointData fundamental_forms(const Immersion& imm, std::span<const double> p);
[[nodiscard]] SubmanifoldPointData gauss_formula(const Immersion& imm, std::span<const double> p);
/// max_i |∇^⊥_{∂_i} H|
[[nodiscard]] double ruh_vilms_residual(const SubmanifoldPointData& d);
[[nodiscard]] double ruh_vilms_residual(const Immersion& imm, std::span<const double> p);
/// −4|H|²H + 2 g^ik g^jl ⟨H, B_ij⟩ B_kl, surfaces only.
[[nodiscard]] std::vector<double> willmore_gradient(const Immersion& imm, std::span<const double> p);

/// Pullback of the Λ^m R^n inner product under the wedge of an orthonormal
/// tangent frame; an independent route to G* g_can.
///
/// The coordinate frame is optionally rotated in the (∂_1, ∂_2) plane by
/// `frame_rotation` radians, then orthonormalized in index order.
class PlueckerOracle {
 public:
  explicit PlueckerOracle(const Immersion& imm, double frame_rotation = 0.0);

  /// Throws FrameDegeneracy when a Gram-Schmidt pivot falls below 1e-10.
  [[nodiscard]] RealTensor pullback(std::span<const double> p) const;
  [[nodiscard]] std::size_t wedge_dimension() const noexcept { return wedge_dim_; }

 private:
  std::size_t m_ = 0;
  std::size_t wedge_dim_ = 0;
  Program program_;  // pivots, then ∂_i W_I
};

inline constexpr double kFramePivotTolerance = 1e-10;

[[nodiscard]] RealTensor gauss_pluecker_oracle(const Immersion& imm, std::span<const double> p);

/// Four residuals of the surface equivalence chain at one point:
/// ‖S^G‖, ‖G*g_can − λg‖, ‖|H|²g − ⟨H,B⟩‖, ‖S₂ − ½|τ|²g‖.
struct EquivalenceResiduals {
  double gauss_stress = 0.0;
  double gauss_conformality = 0.0;
  double pseudo_umbilicity = 0.0;
  double bistress_half_tau = 0.0;
};
[[nodiscard]] EquivalenceResiduals equivalence_residuals(const Immersion& imm, const StressEnergy& inclusion_stress,
                                                         std::span<const double> p);

/// ‖Div S^G + ½ Div S₂ − ¼ d(|τ|²)‖ (Euclidean norm of the covector components).
[[nodiscard]] double gauss_divergence_relation(const Immersion& imm, const StressEnergy& inclusion_stress,
                                               std::span<const double> p);

inline constexpr double kNormalTolerance = 1e-8;

/// Finite-difference and closed-form first variation of the induced metric.
struct OmegaComparison {
  RealTensor fd_omega;
  RealTensor formula_omega;  // −2⟨V, B⟩
  double tangential_part = 0.0;  // |P_T V| before any projection
  bool projected = false;
};

/// A normal variation field. When the supplied field has a tangential part
/// above 1e-8 at the evaluation point it is replaced by its normal projection.
[[nodiscard]] OmegaComparison variation_omega_check(const Immersion& imm, std::span<const Expr> V,
                                                    std::span<const double> p, double step = 1e-4);

struct WeinerResiduals {
  double variation = 0.0;  // |⟨|H|²g − H.B, −2V.B⟩ − ⟨W, V⟩|
  double traceless = 0.0;  // ‖⟨−|H|²g + H.B, B⟩ − ⟨H, tr S⟩H − Σ⟨H,S_ij⟩S^ij‖
  double lhs = 0.0;        // ⟨|H|²g − H.B, −2V.B⟩
  double rhs = 0.0;        // ⟨W, V⟩
};
[[nodiscard]] WeinerResiduals weiner_algebra_check(const Immersion& imm, std::span<const Expr> V,
                                                   std::span<const double> p);

}  // namespace bitensor
