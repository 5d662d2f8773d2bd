#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "bitensor/expr.hpp"
#include "bitensor/program.hpp"
#include "bitensor/tensor.hpp"

namespace bitensor {

/// How a coordinate's parameter interval is treated by sampling and quadrature.
enum class CoordinateKind {
  Bounded,   // closed interval, sampled with a boundary margin
  Periodic,  // wraps around; trapezoid rule
  Polar,     // polar angle of a sphere-type chart, integrated in cos(angle)
};

struct CoordinateRange {
  double lo = -1.0;
  double hi = 1.0;
  CoordinateKind kind = CoordinateKind::Bounded;

  [[nodiscard]] bool periodic() const noexcept { return kind == CoordinateKind::Periodic; }
};

/// Margin kept from non-periodic boundaries when sampling interior points.
inline constexpr double kBoundaryMargin = 1e-3;

/// Determinant threshold below which a metric is treated as degenerate.
inline constexpr double kDegenerateDet = 1e-12;

using ExprTensor = Tensor<Expr>;

/// Metric quantities evaluated at one point of a chart.
///
/// Index conventions: christoffel(k, i, j) = Γ^k_ij,
/// riemann(l, i, j, k) = R^l_ijk with R(∂_i, ∂_j)∂_k = R^l_ijk ∂_l and
/// R(X,Y)Z = ∇_X∇_Y Z − ∇_Y∇_X Z − ∇_[X,Y] Z, ricci(j, k) = R^i_ijk.
struct PointEval {
  std::vector<double> point;
  RealTensor g;
  RealTensor g_inv;
  double sqrt_det_g = 0.0;
  RealTensor dg;           // dg(k, i, j) = ∂_k g_ij
  RealTensor christoffel;  // (k, i, j)
  RealTensor dchristoffel; // (l, k, i, j) = ∂_l Γ^k_ij
  RealTensor riemann;      // (l, i, j, k)
  RealTensor ricci;
  double scalar = 0.0;
};

/// One-chart Riemannian manifold with a symbolic metric.
///
/// Every symbolic object needed downstream (inverse metric, Christoffel
/// symbols and their first derivatives, Ricci tensor, scalar curvature) is
/// built at construction, so a ChartedManifold is immutable and safe to
/// evaluate concurrently.
class ChartedManifold {
 public:
  /// `metric_upper` lists the upper triangle row by row: g11, g12, ..., g1m, g22, ...
  ChartedManifold(std::string name, std::vector<std::string> coords, std::vector<CoordinateRange> domain,
                  std::vector<Expr> metric_upper);

  /// Flat R^n with the identity metric and unbounded coordinates.
  [[nodiscard]] static std::shared_ptr<const ChartedManifold> euclidean(std::string name,
                                                                        std::vector<std::string> coords);

  [[nodiscard]] const std::string& name() const noexcept { return name_; }
  [[nodiscard]] std::size_t dimension() const noexcept { return coords_.size(); }
  [[nodiscard]] const std::vector<std::string>& coords() const noexcept { return coords_; }
  [[nodiscard]] const std::vector<CoordinateRange>& domain() const noexcept { return domain_; }
  /// True when the metric is declared as the constant identity (fast path: Γ = 0).
  [[nodiscard]] bool is_flat() const noexcept { return flat_; }

  [[nodiscard]] const ExprTensor& metric() const noexcept { return metric_; }
  [[nodiscard]] const ExprTensor& inverse_metric() const noexcept { return inverse_; }
  [[nodiscard]] const ExprTensor& christoffel() const noexcept { return christoffel_; }
  [[nodiscard]] const ExprTensor& ricci() const noexcept { return ricci_; }
  [[nodiscard]] const Expr& scalar_curvature() const noexcept { return scalar_; }

  /// Upper-triangle list of the metric, as accepted by the constructor.
  [[nodiscard]] std::vector<Expr> metric_upper() const;

  /// Same chart and domain, metric multiplied by `factor` (a constant or a function).
  [[nodiscard]] std::shared_ptr<const ChartedManifold> with_scaled_metric(const Expr& factor,
                                                                          std::string name) const;

  /// Throws DegenerateMetric when det g <= 1e-12 and DomainViolation when
  /// `p` is outside the declared domain.
  [[nodiscard]] PointEval point_eval(std::span<const double> p) const;

  /// sqrt(det g) at `p`, without the curvature work of point_eval.
  [[nodiscard]] double volume_density(std::span<const double> p) const;

  /// Checks positivity of the leading principal minors on a 9^m grid of
  /// interior points. Throws NotPositiveDefinite naming the first failing point.
  void validate_positive_definite() const;

  /// True when `p` is inside the declared domain (periodic coordinates always are).
  [[nodiscard]] bool contains(std::span<const double> p, double slack = 1e-12) const;

  /// Interior grid with `per_axis` nodes in every coordinate direction.
  [[nodiscard]] std::vector<std::vector<double>> interior_grid(std::size_t per_axis) const;

 private:
  void build();

  std::string name_;
  std::vector<std::string> coords_;
  std::vector<CoordinateRange> domain_;
  bool flat_ = false;
  ExprTensor metric_;
  ExprTensor inverse_;
  ExprTensor dmetric_;
  ExprTensor christoffel_;
  ExprTensor dchristoffel_;
  ExprTensor ricci_;
  Expr scalar_;
  Program metric_program_;
  Program program_;
};

using ManifoldPtr = std::shared_ptr<const ChartedManifold>;

/// Symbolic inverse of a small symmetric matrix (diagonal shortcut, else adjugate).
[[nodiscard]] ExprTensor symbolic_inverse(const ExprTensor& matrix);
[[nodiscard]] Expr symbolic_determinant(const ExprTensor& matrix);

/// Symmetric (0,2) tensor field on a chart, with its first partial
/// derivatives prepared for evaluation.
class SymTensorField {
 public:
  SymTensorField(const ChartedManifold& manifold, ExprTensor components);

  [[nodiscard]] const ExprTensor& components() const noexcept { return components_; }
  /// partials()(i, k, j) = ∂_i T_kj
  [[nodiscard]] const ExprTensor& partials() const noexcept { return partials_; }

  /// Values T_kj and ∂_i T_kj at `p`.
  void evaluate(std::span<const double> p, RealTensor& values, RealTensor& partials) const;

 private:
  ExprTensor components_;
  ExprTensor partials_;
  Program program_;
};

/// ∂_i T_kj for every i, k, j.
[[nodiscard]] ExprTensor symbolic_partials(const ChartedManifold& manifold, const ExprTensor& components);

/// (Div T)_j = g^ik (∇_i T)_kj from pointwise values of T and its partials.
[[nodiscard]] std::vector<double> divergence_at(const PointEval& pe, const RealTensor& values,
                                                const RealTensor& partials);

/// (Div T)_j at `p` for a symmetric 2-tensor field on `manifold`.
[[nodiscard]] std::vector<double> divergence(const ChartedManifold& manifold, const SymTensorField& field,
                                             std::span<const double> p);

/// (L_ξ g)_ij = ∇_i ξ_j + ∇_j ξ_i at `p`; ξ is given by its coordinate components.
[[nodiscard]] RealTensor lie_derivative_metric(const ChartedManifold& manifold, std::span<const Expr> xi,
                                               std::span<const double> p);

/// Frobenius-type norm sqrt(g^ik g^jl T_ij T_kl) of a 2-tensor.
[[nodiscard]] double tensor_norm(const RealTensor& g_inv, const RealTensor& t);

/// g-inner product g^ik g^jl A_ij B_kl of two 2-tensors.
[[nodiscard]] double tensor_inner(const RealTensor& g_inv, const RealTensor& a, const RealTensor& b);

}  // namespace bitensor
