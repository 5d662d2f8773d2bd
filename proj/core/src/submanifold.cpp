#include "bitensor/submanifold.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

#include "bitensor/errors.hpp"

namespace bitensor {

namespace {

void append(std::vector<Expr>& out, const ExprTensor& t) { out.insert(out.end(), t.data().begin(), t.data().end()); }

void take(std::span<const double>& src, RealTensor& dst) {
  std::copy_n(src.begin(), dst.size(), dst.data().begin());
  src = src.subspan(dst.size());
}

void take(std::span<const double>& src, std::vector<double>& dst) {
  std::copy_n(src.begin(), dst.size(), dst.begin());
  src = src.subspan(dst.size());
}

ManifoldPtr ambient_space(std::size_t n) {
  std::vector<std::string> coords;
  for (std::size_t a = 1; a <= n; ++a) coords.push_back("X" + std::to_string(a));
  return ChartedManifold::euclidean("R" + std::to_string(n), std::move(coords));
}

SmoothMap make_inclusion(std::string name, ManifoldPtr source, std::vector<Expr> embedding) {
  ManifoldPtr target = ambient_space(embedding.size());
  return SmoothMap(std::move(name), std::move(source), std::move(target), std::move(embedding));
}

std::string describe_point(std::span<const double> p) {
  std::ostringstream os;
  os.precision(17);
  os << '(';
  for (std::size_t i = 0; i < p.size(); ++i) os << (i ? ", " : "") << p[i];
  os << ')';
  return os.str();
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

void for_each_subset(std::size_t n, std::size_t m, const std::function<void(const std::vector<std::size_t>&)>& fn) {
  std::vector<std::size_t> idx(m);
  std::iota(idx.begin(), idx.end(), 0);
  for (;;) {
    fn(idx);
    std::size_t k = m;
    while (k > 0 && idx[k - 1] == n - m + k - 1) --k;
    if (k == 0) return;
    ++idx[k - 1];
    for (std::size_t j = k; j < m; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace

Immersion::Immersion(std::string name, ManifoldPtr source, std::vector<Expr> embedding)
    : name_(name), inclusion_(make_inclusion(std::move(name), std::move(source), std::move(embedding))) {
  if (ambient_dimension() < dimension()) throw DimensionMismatch("immersion '" + name_ + "': n < m");
  build();
  check_induced_metric();
}

Immersion Immersion::induced(std::string name, std::vector<std::string> coords, std::vector<CoordinateRange> domain,
                             std::vector<Expr> embedding) {
  const std::size_t m = coords.size();
  std::vector<Expr> upper;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i; j < m; ++j) {
      Expr s;
      for (const Expr& x : embedding) s += differentiate(x, coords[i]) * differentiate(x, coords[j]);
      upper.push_back(s);
    }
  }
  auto source = std::make_shared<ChartedManifold>(name, std::move(coords), std::move(domain), std::move(upper));
  return Immersion(std::move(name), std::move(source), std::move(embedding));
}

void Immersion::build() {
  const ChartedManifold& M = source();
  const std::size_t m = dimension();
  const std::size_t n = ambient_dimension();
  const ExprTensor& g = M.metric();
  const ExprTensor& B = inclusion_.second_fundamental();
  const auto& tau = inclusion_.tension_field();

  h_field_.resize(n);
  for (std::size_t a = 0; a < n; ++a) h_field_[a] = tau[a] / Expr(static_cast<double>(m));
  ExprTensor dH({n, m});
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t i = 0; i < m; ++i) dH(a, i) = differentiate(h_field_[a], M.coords()[i]);
  }

  Expr h_sq;
  tau_sq_ = Expr();
  for (std::size_t a = 0; a < n; ++a) {
    h_sq += h_field_[a] * h_field_[a];
    tau_sq_ += tau[a] * tau[a];
  }
  const double md = static_cast<double>(m);
  const Expr& r = M.scalar_curvature();
  sg_field_ = ExprTensor({m, m});
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i; j < m; ++j) {
      Expr hb;
      for (std::size_t a = 0; a < n; ++a) hb += h_field_[a] * B(a, i, j);
      sg_field_(i, j) = (M.ricci()(i, j) - Expr(0.5) * r * g(i, j)) + Expr(0.5 * md * md) * h_sq * g(i, j) -
                        Expr(md) * hb;
      sg_field_(j, i) = sg_field_(i, j);
    }
  }

  std::vector<Expr> outputs(embedding());
  append(outputs, inclusion_.differential());
  append(outputs, B);
  outputs.insert(outputs.end(), h_field_.begin(), h_field_.end());
  append(outputs, dH);
  program_ = Program(outputs, M.coords());

  std::vector<Expr> div_outputs;
  append(div_outputs, sg_field_);
  append(div_outputs, symbolic_partials(M, sg_field_));
  div_outputs.push_back(tau_sq_);
  for (std::size_t i = 0; i < m; ++i) div_outputs.push_back(differentiate(tau_sq_, M.coords()[i]));
  divergence_program_ = Program(div_outputs, M.coords());
}

void Immersion::check_induced_metric() const {
  const ChartedManifold& M = source();
  const std::size_t m = dimension();
  const std::size_t n = ambient_dimension();
  std::vector<Expr> outputs(M.metric().data());
  append(outputs, inclusion_.differential());
  const Program prog(outputs, M.coords());
  const std::size_t per_axis = m <= 3 ? 9 : 5;
  for (const auto& p : M.interior_grid(per_axis)) {
    const std::vector<double> v = prog.evaluate(p);
    double scale = 1.0;
    for (std::size_t k = 0; k < m * m; ++k) scale = std::max(scale, std::abs(v[k]));
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        double induced = 0.0;
        for (std::size_t a = 0; a < n; ++a) induced += v[m * m + a * m + i] * v[m * m + a * m + j];
        if (std::abs(induced - v[i * m + j]) > 1e-12 * scale) {
          throw ImmersionFailure("immersion '" + name_ + "': declared metric differs from the induced metric at " +
                                 describe_point(p));
        }
      }
    }
  }
}

std::vector<Expr> Immersion::normal_projection(std::span<const Expr> ambient) const {
  const std::size_t m = dimension();
  const std::size_t n = ambient_dimension();
  if (ambient.size() != n) throw DimensionMismatch("normal_projection: field must have n components");
  const ExprTensor& J = inclusion_.differential();
  const ExprTensor& ginv = source().inverse_metric();
  std::vector<Expr> along(m);  // X_j · W
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t a = 0; a < n; ++a) along[j] += J(a, j) * ambient[a];
  }
  std::vector<Expr> out(ambient.begin(), ambient.end());
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        if (ginv(i, j).is_zero()) continue;
        out[a] -= J(a, i) * ginv(i, j) * along[j];
      }
    }
  }
  return out;
}

SubmanifoldPointData Immersion::evaluate(std::span<const double> p) const {
  const std::size_t m = dimension();
  const std::size_t n = ambient_dimension();
  const PointEval pe = source().point_eval(p);

  SubmanifoldPointData d;
  d.point.assign(p.begin(), p.end());
  d.position.resize(n);
  d.jacobian = RealTensor({n, m});
  d.B = RealTensor({n, m, m});
  d.H.resize(n);
  d.nabla_perp_H = RealTensor({n, m});
  RealTensor dH({n, m});
  const std::vector<double> values = program_.evaluate(p);
  std::span<const double> rest(values);
  take(rest, d.position);
  take(rest, d.jacobian);
  take(rest, d.B);
  take(rest, d.H);
  take(rest, dH);

  d.g = pe.g;
  d.g_inv = pe.g_inv;
  d.ricci = pe.ricci;
  d.scalar = pe.scalar;

  Eigen::MatrixXd J(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t i = 0; i < m; ++i) J(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(i)) = d.jacobian(a, i);
  }
  const Eigen::MatrixXd JtJ = J.transpose() * J;
  if (!(JtJ.determinant() > kDegenerateDet)) {
    throw ImmersionFailure("immersion '" + name_ + "' loses rank at " + describe_point(p));
  }
  double scale = 1.0;
  for (double v : pe.g.data()) scale = std::max(scale, std::abs(v));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (std::abs(JtJ(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) - pe.g(i, j)) > 1e-12 * scale) {
        throw ImmersionFailure("immersion '" + name_ + "': declared metric differs from the induced metric at " +
                               describe_point(p));
      }
    }
  }
  const Eigen::MatrixXd PN =
      Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)) - J * JtJ.ldlt().solve(J.transpose());
  d.normal_projector = RealTensor({n, n});
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) d.normal_projector(a, b) = PN(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
  }

  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t i = 0; i < m; ++i) {
      double s = 0.0;
      for (std::size_t b = 0; b < n; ++b) s += d.normal_projector(a, b) * dH(b, i);
      d.nabla_perp_H(a, i) = s;
    }
  }

  d.H_norm_sq = dot(d.H, d.H);
  d.HdotB = RealTensor({m, m});
  d.pseudo_umbilic_residual = RealTensor({m, m});
  d.S_traceless = RealTensor({n, m, m});
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      double hb = 0.0;
      for (std::size_t a = 0; a < n; ++a) {
        hb += d.H[a] * d.B(a, i, j);
        d.S_traceless(a, i, j) = d.B(a, i, j) - d.H[a] * d.g(i, j);
      }
      d.HdotB(i, j) = hb;
      d.pseudo_umbilic_residual(i, j) = d.H_norm_sq * d.g(i, j) - hb;
    }
  }

  const double md = static_cast<double>(m);
  d.gauss_pullback = RealTensor({m, m});
  d.S_G = RealTensor({m, m});
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) d.gauss_pullback(i, j) = md * d.HdotB(i, j) - d.ricci(i, j);
  }
  d.gauss_energy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) d.gauss_energy += 0.5 * d.g_inv(i, j) * d.gauss_pullback(i, j);
  }
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) d.S_G(i, j) = d.gauss_energy * d.g(i, j) - d.gauss_pullback(i, j);
  }

  if (m == 2) {
    d.willmore_gradient.assign(n, 0.0);
    for (std::size_t a = 0; a < n; ++a) {
      double s = -4.0 * d.H_norm_sq * d.H[a];
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
          for (std::size_t k = 0; k < m; ++k) {
            for (std::size_t l = 0; l < m; ++l) s += 2.0 * d.g_inv(i, k) * d.g_inv(j, l) * d.HdotB(i, j) * d.B(a, k, l);
          }
        }
      }
      d.willmore_gradient[a] = s;
    }
  }
  return d;
}

void Immersion::gauss_divergence(std::span<const double> p, std::vector<double>& div_sg,
                                 std::vector<double>& d_tau_sq) const {
  const std::size_t m = dimension();
  const PointEval pe = source().point_eval(p);
  RealTensor sg({m, m}), dsg({m, m, m});
  const std::vector<double> values = divergence_program_.evaluate(p);
  std::span<const double> rest(values);
  take(rest, sg);
  take(rest, dsg);
  rest = rest.subspan(1);
  d_tau_sq.assign(rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(m));
  div_sg = divergence_at(pe, sg, dsg);
}

SubmanifoldPointData fundamental_forms(const Immersion& imm, std::span<const double> p) { return imm.evaluate(p); }

SubmanifoldPointData gauss_formula(const Immersion& imm, std::span<const double> p) { return imm.evaluate(p); }

double ruh_vilms_residual(const SubmanifoldPointData& d) {
  double worst = 0.0;
  for (std::size_t i = 0; i < d.nabla_perp_H.dim(1); ++i) {
    const std::vector<double> col = column(d.nabla_perp_H, i);
    worst = std::max(worst, std::sqrt(dot(col, col)));
  }
  return worst;
}

double ruh_vilms_residual(const Immersion& imm, std::span<const double> p) { return ruh_vilms_residual(imm.evaluate(p)); }

std::vector<double> willmore_gradient(const Immersion& imm, std::span<const double> p) {
  if (imm.dimension() != 2) throw DimensionMismatch("willmore_gradient needs a surface (m = 2)");
  return imm.evaluate(p).willmore_gradient;
}

PlueckerOracle::PlueckerOracle(const Immersion& imm, double frame_rotation) : m_(imm.dimension()) {
  const std::size_t n = imm.ambient_dimension();
  const ExprTensor& J = imm.inclusion().differential();
  const auto& coords = imm.source().coords();

  std::vector<std::vector<Expr>> frame(m_, std::vector<Expr>(n));
  for (std::size_t k = 0; k < m_; ++k) {
    for (std::size_t a = 0; a < n; ++a) frame[k][a] = J(a, k);
  }
  if (m_ >= 2 && frame_rotation != 0.0) {
    const double c = std::cos(frame_rotation), s = std::sin(frame_rotation);
    for (std::size_t a = 0; a < n; ++a) {
      const Expr x1 = frame[0][a], x2 = frame[1][a];
      frame[0][a] = Expr(c) * x1 + Expr(s) * x2;
      frame[1][a] = Expr(-s) * x1 + Expr(c) * x2;
    }
  }

  std::vector<Expr> outputs;
  std::vector<std::vector<Expr>> ortho;
  for (std::size_t k = 0; k < m_; ++k) {
    std::vector<Expr> u = frame[k];
    for (const auto& e : ortho) {
      Expr proj;
      for (std::size_t a = 0; a < n; ++a) proj += frame[k][a] * e[a];
      for (std::size_t a = 0; a < n; ++a) u[a] -= proj * e[a];
    }
    Expr norm_sq;
    for (std::size_t a = 0; a < n; ++a) norm_sq += u[a] * u[a];
    const Expr pivot = sqrt(norm_sq);
    outputs.push_back(pivot);
    for (std::size_t a = 0; a < n; ++a) u[a] = u[a] / pivot;
    ortho.push_back(std::move(u));
  }

  for_each_subset(n, m_, [&](const std::vector<std::size_t>& rows) {
    ExprTensor minor({m_, m_});
    for (std::size_t r = 0; r < m_; ++r) {
      for (std::size_t k = 0; k < m_; ++k) minor(r, k) = ortho[k][rows[r]];
    }
    const Expr w = symbolic_determinant(minor);
    for (std::size_t i = 0; i < m_; ++i) outputs.push_back(differentiate(w, coords[i]));
    ++wedge_dim_;
  });
  program_ = Program(outputs, coords);
}

RealTensor PlueckerOracle::pullback(std::span<const double> p) const {
  const std::vector<double> v = program_.evaluate(p);
  for (std::size_t k = 0; k < m_; ++k) {
    if (!(v[k] >= kFramePivotTolerance)) {
      throw FrameDegeneracy("Gram-Schmidt pivot " + std::to_string(v[k]) + " at " + describe_point(p));
    }
  }
  RealTensor out({m_, m_});
  for (std::size_t w = 0; w < wedge_dim_; ++w) {
    const double* dw = v.data() + m_ + w * m_;
    for (std::size_t i = 0; i < m_; ++i) {
      for (std::size_t k = 0; k < m_; ++k) out(i, k) += dw[i] * dw[k];
    }
  }
  return out;
}

RealTensor gauss_pluecker_oracle(const Immersion& imm, std::span<const double> p) { return PlueckerOracle(imm).pullback(p); }

EquivalenceResiduals equivalence_residuals(const Immersion& imm, const StressEnergy& inclusion_stress,
                                           std::span<const double> p) {
  const SubmanifoldPointData d = imm.evaluate(p);
  const PointEval pe = imm.source().point_eval(p);
  const StressTensors st = inclusion_stress.evaluate(p);
  EquivalenceResiduals r;
  r.gauss_stress = tensor_norm(d.g_inv, d.S_G);
  r.gauss_conformality = fit_lambda(pe, d.gauss_pullback).residual;
  r.pseudo_umbilicity = tensor_norm(d.g_inv, d.pseudo_umbilic_residual);
  const double m = static_cast<double>(imm.dimension());
  RealTensor diff = st.S2;
  for (std::size_t k = 0; k < diff.size(); ++k) diff.data()[k] -= 0.5 * m * m * d.H_norm_sq * d.g.data()[k];
  r.bistress_half_tau = tensor_norm(d.g_inv, diff);
  return r;
}

double gauss_divergence_relation(const Immersion& imm, const StressEnergy& inclusion_stress, std::span<const double> p) {
  std::vector<double> div_sg, d_tau_sq;
  imm.gauss_divergence(p, div_sg, d_tau_sq);
  const StressTensors st = inclusion_stress.evaluate(p);
  double s = 0.0;
  for (std::size_t i = 0; i < div_sg.size(); ++i) {
    const double r = div_sg[i] + 0.5 * st.div_S2[i] - 0.25 * d_tau_sq[i];
    s += r * r;
  }
  return std::sqrt(s);
}

namespace {

struct FieldValues {
  std::vector<double> v;
  RealTensor dv;  // (α, i)
};

FieldValues evaluate_field(const Immersion& imm, std::span<const Expr> V, std::span<const double> p) {
  const std::size_t n = imm.ambient_dimension();
  const std::size_t m = imm.dimension();
  std::vector<Expr> outputs(V.begin(), V.end());
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t i = 0; i < m; ++i) outputs.push_back(differentiate(V[a], imm.source().coords()[i]));
  }
  const std::vector<double> vals = Program(outputs, imm.source().coords()).evaluate(p);
  FieldValues f;
  f.v.assign(vals.begin(), vals.begin() + static_cast<std::ptrdiff_t>(n));
  f.dv = RealTensor({n, m});
  std::copy(vals.begin() + static_cast<std::ptrdiff_t>(n), vals.end(), f.dv.data().begin());
  return f;
}

double tangential_norm(const SubmanifoldPointData& d, std::span<const double> v) {
  const std::size_t n = v.size();
  double s = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    double t = v[a];
    for (std::size_t b = 0; b < n; ++b) t -= d.normal_projector(a, b) * v[b];
    s += t * t;
  }
  return std::sqrt(s);
}

}  // namespace

OmegaComparison variation_omega_check(const Immersion& imm, std::span<const Expr> V, std::span<const double> p,
                                      double step) {
  const std::size_t n = imm.ambient_dimension();
  const std::size_t m = imm.dimension();
  if (V.size() != n) throw DimensionMismatch("variation field must have n components");
  const SubmanifoldPointData d = imm.evaluate(p);
  OmegaComparison out;
  FieldValues f = evaluate_field(imm, V, p);
  out.tangential_part = tangential_norm(d, f.v);
  if (out.tangential_part > kNormalTolerance) {
    const std::vector<Expr> projected = imm.normal_projection(V);
    f = evaluate_field(imm, projected, p);
    out.projected = true;
  }
  auto metric_at = [&](double t) {
    RealTensor g({m, m});
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        double s = 0.0;
        for (std::size_t a = 0; a < n; ++a) {
          s += (d.jacobian(a, i) + t * f.dv(a, i)) * (d.jacobian(a, j) + t * f.dv(a, j));
        }
        g(i, j) = s;
      }
    }
    return g;
  };
  const RealTensor plus = metric_at(step), minus = metric_at(-step);
  out.fd_omega = RealTensor({m, m});
  out.formula_omega = RealTensor({m, m});
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      out.fd_omega(i, j) = (plus(i, j) - minus(i, j)) / (2.0 * step);
      double vb = 0.0;
      for (std::size_t a = 0; a < n; ++a) vb += f.v[a] * d.B(a, i, j);
      out.formula_omega(i, j) = -2.0 * vb;
    }
  }
  return out;
}

WeinerResiduals weiner_algebra_check(const Immersion& imm, std::span<const Expr> V, std::span<const double> p) {
  const std::size_t n = imm.ambient_dimension();
  const std::size_t m = imm.dimension();
  if (m != 2) throw DimensionMismatch("weiner_algebra_check needs a surface (m = 2)");
  if (V.size() != n) throw DimensionMismatch("variation field must have n components");
  const SubmanifoldPointData d = imm.evaluate(p);
  std::vector<double> v = evaluate_field(imm, V, p).v;
  if (tangential_norm(d, v) > kNormalTolerance) v = evaluate_field(imm, imm.normal_projection(V), p).v;

  RealTensor vb({m, m});
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      double s = 0.0;
      for (std::size_t a = 0; a < n; ++a) s += v[a] * d.B(a, i, j);
      vb(i, j) = -2.0 * s;
    }
  }
  WeinerResiduals r;
  r.lhs = tensor_inner(d.g_inv, d.pseudo_umbilic_residual, vb);
  r.rhs = dot(d.willmore_gradient, v);
  r.variation = std::abs(r.lhs - r.rhs);

  auto contract = [&](const RealTensor& coeff, const RealTensor& field, std::size_t a) {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t k = 0; k < m; ++k) {
          for (std::size_t l = 0; l < m; ++l) s += d.g_inv(i, k) * d.g_inv(j, l) * coeff(i, j) * field(a, k, l);
        }
      }
    }
    return s;
  };
  RealTensor h_dot_s({m, m});
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      double s = 0.0;
      for (std::size_t a = 0; a < n; ++a) s += d.H[a] * d.S_traceless(a, i, j);
      h_dot_s(i, j) = s;
    }
  }
  RealTensor minus_pu({m, m});
  for (std::size_t k = 0; k < minus_pu.size(); ++k) minus_pu.data()[k] = -d.pseudo_umbilic_residual.data()[k];
  double h_trace_s = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    double tr = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) tr += d.g_inv(i, j) * d.S_traceless(a, i, j);
    }
    h_trace_s += d.H[a] * tr;
  }
  double sq = 0.0;
  for (std::size_t a = 0; a < n; ++a) {
    const double lhs = contract(minus_pu, d.B, a);
    const double rhs = h_trace_s * d.H[a] + contract(h_dot_s, d.S_traceless, a);
    sq += (lhs - rhs) * (lhs - rhs);
  }
  r.traceless = std::sqrt(sq);
  return r;
}

}  // namespace bitensor
