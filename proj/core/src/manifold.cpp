#include "bitensor/manifold.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "bitensor/errors.hpp"

namespace bitensor {

namespace {

std::string format_point(std::span<const double> p) {
  std::ostringstream os;
  os.precision(17);
  os << '(';
  for (std::size_t i = 0; i < p.size(); ++i) os << (i ? ", " : "") << p[i];
  os << ')';
  return os.str();
}

void append(std::vector<Expr>& out, const ExprTensor& t) { out.insert(out.end(), t.data().begin(), t.data().end()); }

void take(std::span<const double>& src, RealTensor& dst) {
  std::copy_n(src.begin(), dst.size(), dst.data().begin());
  src = src.subspan(dst.size());
}

Expr minor_determinant(const ExprTensor& a, std::vector<std::size_t> rows, std::vector<std::size_t> cols) {
  const std::size_t n = rows.size();
  if (n == 1) return a(rows[0], cols[0]);
  if (n == 2) return a(rows[0], cols[0]) * a(rows[1], cols[1]) - a(rows[0], cols[1]) * a(rows[1], cols[0]);
  Expr det;
  for (std::size_t c = 0; c < n; ++c) {
    if (a(rows[0], cols[c]).is_zero()) continue;
    std::vector<std::size_t> sub_rows(rows.begin() + 1, rows.end());
    std::vector<std::size_t> sub_cols;
    for (std::size_t k = 0; k < n; ++k) {
      if (k != c) sub_cols.push_back(cols[k]);
    }
    const Expr term = a(rows[0], cols[c]) * minor_determinant(a, sub_rows, sub_cols);
    det = (c % 2 == 0) ? det + term : det - term;
  }
  return det;
}

}  // namespace

Expr symbolic_determinant(const ExprTensor& matrix) {
  const std::size_t n = matrix.dim(0);
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  return minor_determinant(matrix, idx, idx);
}

ExprTensor symbolic_inverse(const ExprTensor& matrix) {
  const std::size_t n = matrix.dim(0);
  ExprTensor inv({n, n});
  bool diagonal = true;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && !matrix(i, j).is_zero()) diagonal = false;
    }
  }
  if (diagonal) {
    for (std::size_t i = 0; i < n; ++i) inv(i, i) = Expr(1.0) / matrix(i, i);
    return inv;
  }
  const Expr det = symbolic_determinant(matrix);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      // cofactor C_ji, the matrix is symmetric so inv(i,j) = C_ij / det
      std::vector<std::size_t> rows, cols;
      for (std::size_t k = 0; k < n; ++k) {
        if (k != j) rows.push_back(k);
        if (k != i) cols.push_back(k);
      }
      Expr cof = n == 1 ? Expr(1.0) : minor_determinant(matrix, rows, cols);
      if ((i + j) % 2 == 1) cof = -cof;
      inv(i, j) = cof / det;
      inv(j, i) = inv(i, j);
    }
  }
  return inv;
}

ChartedManifold::ChartedManifold(std::string name, std::vector<std::string> coords,
                                 std::vector<CoordinateRange> domain, std::vector<Expr> metric_upper)
    : name_(std::move(name)), coords_(std::move(coords)), domain_(std::move(domain)) {
  const std::size_t m = coords_.size();
  if (m == 0) throw DimensionMismatch("manifold '" + name_ + "' has no coordinates");
  if (domain_.size() != m) throw DimensionMismatch("manifold '" + name_ + "': domain size differs from dimension");
  if (metric_upper.size() != m * (m + 1) / 2) {
    throw DimensionMismatch("manifold '" + name_ + "': metric needs " + std::to_string(m * (m + 1) / 2) +
                            " upper-triangle entries");
  }
  for (const auto& r : domain_) {
    if (!(r.lo < r.hi)) throw std::invalid_argument("manifold '" + name_ + "': empty coordinate interval");
  }
  metric_ = ExprTensor({m, m});
  std::size_t k = 0;
  flat_ = true;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i; j < m; ++j) {
      metric_(i, j) = metric_upper[k];
      metric_(j, i) = metric_upper[k];
      if (!metric_upper[k].is_constant()) flat_ = false;
      ++k;
    }
  }
  build();
}

std::shared_ptr<const ChartedManifold> ChartedManifold::euclidean(std::string name, std::vector<std::string> coords) {
  const std::size_t n = coords.size();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<CoordinateRange> domain(n, CoordinateRange{-inf, inf, CoordinateKind::Bounded});
  std::vector<Expr> metric;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) metric.push_back(Expr::constant(i == j ? 1.0 : 0.0));
  }
  return std::make_shared<ChartedManifold>(std::move(name), std::move(coords), std::move(domain), std::move(metric));
}

void ChartedManifold::build() {
  const std::size_t m = dimension();
  inverse_ = symbolic_inverse(metric_);

  dmetric_ = ExprTensor({m, m, m});
  for (std::size_t c = 0; c < m; ++c) {
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = i; j < m; ++j) {
        dmetric_(c, i, j) = differentiate(metric_(i, j), coords_[c]);
        dmetric_(c, j, i) = dmetric_(c, i, j);
      }
    }
  }

  christoffel_ = ExprTensor({m, m, m});
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = i; j < m; ++j) {
        Expr sum;
        for (std::size_t l = 0; l < m; ++l) {
          if (inverse_(k, l).is_zero()) continue;
          const Expr bracket = dmetric_(i, j, l) + dmetric_(j, i, l) - dmetric_(l, i, j);
          if (bracket.is_zero()) continue;
          sum += inverse_(k, l) * bracket;
        }
        christoffel_(k, i, j) = Expr(0.5) * sum;
        christoffel_(k, j, i) = christoffel_(k, i, j);
      }
    }
  }

  dchristoffel_ = ExprTensor({m, m, m, m});
  for (std::size_t l = 0; l < m; ++l) {
    for (std::size_t k = 0; k < m; ++k) {
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i; j < m; ++j) {
          dchristoffel_(l, k, i, j) = differentiate(christoffel_(k, i, j), coords_[l]);
          dchristoffel_(l, k, j, i) = dchristoffel_(l, k, i, j);
        }
      }
    }
  }

  // ricci_jk = R^i_ijk = ∂_iΓ^i_jk − ∂_jΓ^i_ik + Γ^i_ip Γ^p_jk − Γ^i_jp Γ^p_ik
  ricci_ = ExprTensor({m, m});
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t k = j; k < m; ++k) {
      Expr sum;
      for (std::size_t i = 0; i < m; ++i) {
        sum += dchristoffel_(i, i, j, k) - dchristoffel_(j, i, i, k);
        for (std::size_t p = 0; p < m; ++p) {
          sum += christoffel_(i, i, p) * christoffel_(p, j, k) - christoffel_(i, j, p) * christoffel_(p, i, k);
        }
      }
      ricci_(j, k) = sum;
      ricci_(k, j) = sum;
    }
  }
  scalar_ = Expr();
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t k = 0; k < m; ++k) scalar_ += inverse_(j, k) * ricci_(j, k);
  }

  metric_program_ = Program(metric_.data(), coords_);
  std::vector<Expr> outputs;
  append(outputs, metric_);
  append(outputs, inverse_);
  append(outputs, dmetric_);
  append(outputs, christoffel_);
  append(outputs, dchristoffel_);
  program_ = Program(outputs, coords_);
}

std::vector<Expr> ChartedManifold::metric_upper() const {
  std::vector<Expr> out;
  for (std::size_t i = 0; i < dimension(); ++i) {
    for (std::size_t j = i; j < dimension(); ++j) out.push_back(metric_(i, j));
  }
  return out;
}

std::shared_ptr<const ChartedManifold> ChartedManifold::with_scaled_metric(const Expr& factor, std::string name) const {
  std::vector<Expr> upper = metric_upper();
  for (Expr& e : upper) e = factor * e;
  return std::make_shared<ChartedManifold>(std::move(name), coords_, domain_, std::move(upper));
}

bool ChartedManifold::contains(std::span<const double> p, double slack) const {
  if (p.size() != dimension()) return false;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!std::isfinite(p[i])) return false;
    if (domain_[i].periodic()) continue;
    if (p[i] < domain_[i].lo - slack || p[i] > domain_[i].hi + slack) return false;
  }
  return true;
}

PointEval ChartedManifold::point_eval(std::span<const double> p) const {
  const std::size_t m = dimension();
  if (p.size() != m) throw DimensionMismatch("point_eval on '" + name_ + "': wrong number of coordinates");
  if (!contains(p)) throw DomainViolation("point " + format_point(p) + " is outside the domain of '" + name_ + "'");

  PointEval pe;
  pe.point.assign(p.begin(), p.end());
  pe.g = RealTensor({m, m});
  pe.g_inv = RealTensor({m, m});
  pe.dg = RealTensor({m, m, m});
  pe.christoffel = RealTensor({m, m, m});
  pe.dchristoffel = RealTensor({m, m, m, m});

  Eigen::MatrixXd g(m, m);
  {
    const std::vector<double> gv = metric_program_.evaluate(p);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = gv[i * m + j];
    }
  }
  const double det = g.determinant();
  if (!(det > kDegenerateDet)) {
    throw DegenerateMetric("metric of '" + name_ + "' is degenerate at " + format_point(p) +
                           " (det = " + std::to_string(det) + ")");
  }
  pe.sqrt_det_g = std::sqrt(det);

  const std::vector<double> values = program_.evaluate(p);
  std::span<const double> rest(values);
  take(rest, pe.g);
  take(rest, pe.g_inv);
  take(rest, pe.dg);
  take(rest, pe.christoffel);
  take(rest, pe.dchristoffel);

  pe.riemann = RealTensor({m, m, m, m});
  for (std::size_t l = 0; l < m; ++l) {
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t k = 0; k < m; ++k) {
          double r = pe.dchristoffel(i, l, j, k) - pe.dchristoffel(j, l, i, k);
          for (std::size_t q = 0; q < m; ++q) {
            r += pe.christoffel(l, i, q) * pe.christoffel(q, j, k) - pe.christoffel(l, j, q) * pe.christoffel(q, i, k);
          }
          pe.riemann(l, i, j, k) = r;
        }
      }
    }
  }
  pe.ricci = RealTensor({m, m});
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t k = 0; k < m; ++k) {
      double r = 0.0;
      for (std::size_t i = 0; i < m; ++i) r += pe.riemann(i, i, j, k);
      pe.ricci(j, k) = r;
    }
  }
  pe.scalar = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t k = 0; k < m; ++k) pe.scalar += pe.g_inv(j, k) * pe.ricci(j, k);
  }
  return pe;
}

double ChartedManifold::volume_density(std::span<const double> p) const {
  const std::size_t m = dimension();
  if (p.size() != m) throw DimensionMismatch("volume_density on '" + name_ + "': wrong number of coordinates");
  const std::vector<double> gv = metric_program_.evaluate(p);
  const Eigen::Map<const Eigen::MatrixXd> g(gv.data(), static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  const double det = g.determinant();
  if (!(det > kDegenerateDet)) {
    throw DegenerateMetric("metric of '" + name_ + "' is degenerate at " + format_point(p));
  }
  return std::sqrt(det);
}

std::vector<std::vector<double>> ChartedManifold::interior_grid(std::size_t per_axis) const {
  const std::size_t m = dimension();
  std::vector<std::vector<double>> axes(m);
  for (std::size_t c = 0; c < m; ++c) {
    double lo = domain_[c].lo, hi = domain_[c].hi;
    if (!std::isfinite(lo)) lo = std::isfinite(hi) ? hi - 2.0 : -1.0;
    if (!std::isfinite(hi)) hi = lo + 2.0;
    if (!domain_[c].periodic()) {
      lo += kBoundaryMargin;
      hi -= kBoundaryMargin;
    }
    for (std::size_t s = 0; s < per_axis; ++s) {
      axes[c].push_back(lo + (hi - lo) * (static_cast<double>(s) + 0.5) / static_cast<double>(per_axis));
    }
  }
  std::vector<std::vector<double>> grid;
  std::vector<std::size_t> idx(m, 0);
  for (;;) {
    std::vector<double> p(m);
    for (std::size_t c = 0; c < m; ++c) p[c] = axes[c][idx[c]];
    grid.push_back(std::move(p));
    std::size_t c = 0;
    while (c < m && ++idx[c] == per_axis) idx[c++] = 0;
    if (c == m) break;
  }
  return grid;
}

void ChartedManifold::validate_positive_definite() const {
  const std::size_t m = dimension();
  // a constant metric needs one evaluation
  const auto grid = flat_ ? std::vector<std::vector<double>>{std::vector<double>(m, 0.0)} : interior_grid(9);
  for (const auto& p : grid) {
    const std::vector<double> gv = metric_program_.evaluate(p);
    Eigen::MatrixXd g(m, m);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = gv[i * m + j];
    }
    for (Eigen::Index k = 1; k <= static_cast<Eigen::Index>(m); ++k) {
      if (!(g.topLeftCorner(k, k).determinant() > 0.0)) {
        throw NotPositiveDefinite("metric of '" + name_ + "' is not positive definite at " + format_point(p));
      }
    }
  }
}

ExprTensor symbolic_partials(const ChartedManifold& manifold, const ExprTensor& components) {
  const std::size_t m = manifold.dimension();
  ExprTensor out({m, m, m});
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t k = 0; k < m; ++k) {
      for (std::size_t j = k; j < m; ++j) {
        out(i, k, j) = differentiate(components(k, j), manifold.coords()[i]);
        out(i, j, k) = out(i, k, j);
      }
    }
  }
  return out;
}

SymTensorField::SymTensorField(const ChartedManifold& manifold, ExprTensor components)
    : components_(std::move(components)) {
  const std::size_t m = manifold.dimension();
  if (components_.dims() != std::vector<std::size_t>{m, m}) {
    throw DimensionMismatch("SymTensorField: components must be m x m");
  }
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      // stored symmetric: the upper triangle is authoritative
      components_(j, i) = components_(i, j);
    }
  }
  partials_ = symbolic_partials(manifold, components_);
  std::vector<Expr> outputs;
  append(outputs, components_);
  append(outputs, partials_);
  program_ = Program(outputs, manifold.coords());
}

void SymTensorField::evaluate(std::span<const double> p, RealTensor& values, RealTensor& partials) const {
  const std::size_t m = components_.dim(0);
  values = RealTensor({m, m});
  partials = RealTensor({m, m, m});
  const std::vector<double> out = program_.evaluate(p);
  std::span<const double> rest(out);
  take(rest, values);
  take(rest, partials);
}

std::vector<double> divergence_at(const PointEval& pe, const RealTensor& t, const RealTensor& dt) {
  const std::size_t m = pe.g.dim(0);
  std::vector<double> div(m, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t k = 0; k < m; ++k) {
        const double gik = pe.g_inv(i, k);
        if (gik == 0.0) continue;
        double cov = dt(i, k, j);
        for (std::size_t l = 0; l < m; ++l) {
          cov -= pe.christoffel(l, i, k) * t(l, j) + pe.christoffel(l, i, j) * t(k, l);
        }
        sum += gik * cov;
      }
    }
    div[j] = sum;
  }
  return div;
}

std::vector<double> divergence(const ChartedManifold& manifold, const SymTensorField& field, std::span<const double> p) {
  const PointEval pe = manifold.point_eval(p);
  RealTensor values, partials;
  field.evaluate(p, values, partials);
  return divergence_at(pe, values, partials);
}

RealTensor lie_derivative_metric(const ChartedManifold& manifold, std::span<const Expr> xi, std::span<const double> p) {
  const std::size_t m = manifold.dimension();
  if (xi.size() != m) throw DimensionMismatch("lie_derivative_metric: vector field has wrong number of components");
  std::vector<Expr> outputs(xi.begin(), xi.end());
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t i = 0; i < m; ++i) outputs.push_back(differentiate(xi[k], manifold.coords()[i]));
  }
  const std::vector<double> v = Program(outputs, manifold.coords()).evaluate(p);
  auto dxi = [&](std::size_t k, std::size_t i) { return v[m + k * m + i]; };  // ∂_i ξ^k
  const PointEval pe = manifold.point_eval(p);
  RealTensor lie({m, m});
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < m; ++k) {
        s += v[k] * pe.dg(k, i, j) + pe.g(k, j) * dxi(k, i) + pe.g(i, k) * dxi(k, j);
      }
      lie(i, j) = s;
    }
  }
  return lie;
}

double tensor_inner(const RealTensor& g_inv, const RealTensor& a, const RealTensor& b) {
  const std::size_t m = g_inv.dim(0);
  double s = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      for (std::size_t k = 0; k < m; ++k) {
        for (std::size_t l = 0; l < m; ++l) s += g_inv(i, k) * g_inv(j, l) * a(i, j) * b(k, l);
      }
    }
  }
  return s;
}

double tensor_norm(const RealTensor& g_inv, const RealTensor& t) { return std::sqrt(std::max(0.0, tensor_inner(g_inv, t, t))); }

}  // namespace bitensor
