#include "bitensor/stress_energy.hpp"

#include <cmath>

#include "bitensor/errors.hpp"

namespace bitensor {

namespace {

void append(std::vector<Expr>& out, const ExprTensor& t) { out.insert(out.end(), t.data().begin(), t.data().end()); }

void take(std::span<const double>& src, RealTensor& dst) {
  std::copy_n(src.begin(), dst.size(), dst.data().begin());
  src = src.subspan(dst.size());
}

}  // namespace

StressEnergy::StressEnergy(SmoothMap map) : map_(std::move(map)) {
  const ChartedManifold& M = map_.source();
  const std::size_t m = M.dimension();
  const std::size_t n = map_.target().dimension();
  const ExprTensor& g = M.metric();
  const ExprTensor& ginv = M.inverse_metric();
  const ExprTensor& h = map_.target_metric_along();
  const ExprTensor& dphi = map_.differential();
  const ExprTensor& ntau = map_.tension_derivative();
  const std::vector<Expr>& tau = map_.tension_field();

  auto h_inner = [&](auto&& u, auto&& v) {
    Expr s;
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        if (h(a, b).is_zero()) continue;
        s += h(a, b) * u(a) * v(b);
      }
    }
    return s;
  };

  // pairing(i, j) = ⟨dφ(∂_i), ∇_j τ⟩
  ExprTensor pairing({m, m});
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      pairing(i, j) = h_inner([&](std::size_t a) { return dphi(a, i); }, [&](std::size_t b) { return ntau(b, j); });
    }
  }
  Expr half_tau_sq = Expr(0.5) * h_inner([&](std::size_t a) { return tau[a]; }, [&](std::size_t b) { return tau[b]; });
  Expr trace_pairing;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) trace_pairing += ginv(i, j) * pairing(i, j);
  }
  const Expr coefficient = half_tau_sq + trace_pairing;

  s_ = ExprTensor({m, m});
  s2_ = ExprTensor({m, m});
  const Expr& e = map_.energy_density_field();
  const ExprTensor& pull = map_.pullback_metric_field();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i; j < m; ++j) {
      s_(i, j) = e * g(i, j) - pull(i, j);
      s_(j, i) = s_(i, j);
      s2_(i, j) = coefficient * g(i, j) - pairing(i, j) - pairing(j, i);
      s2_(j, i) = s2_(i, j);
    }
  }
  std::vector<Expr> outputs;
  append(outputs, s_);
  append(outputs, symbolic_partials(M, s_));
  append(outputs, s2_);
  append(outputs, symbolic_partials(M, s2_));
  program_ = Program(outputs, M.coords());
}

StressTensors StressEnergy::evaluate(std::span<const double> p) const { return evaluate(map_.evaluate(p)); }

StressTensors StressEnergy::evaluate(const MapPointData& d) const {
  const std::size_t m = map_.source().dimension();
  const PointEval pe = map_.source().point_eval(d.point);
  StressTensors out;
  out.S = RealTensor({m, m});
  out.S2 = RealTensor({m, m});
  RealTensor dS({m, m, m}), dS2({m, m, m});
  const std::vector<double> values = program_.evaluate(d.point);
  std::span<const double> rest(values);
  take(rest, out.S);
  take(rest, dS);
  take(rest, out.S2);
  take(rest, dS2);
  out.div_S = divergence_at(pe, out.S, dS);
  out.div_S2 = divergence_at(pe, out.S2, dS2);
  out.tau_pairing.resize(m);
  out.tau2_pairing.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    const std::vector<double> col = column(d.dphi, i);
    out.tau_pairing[i] = target_inner(d.target_metric, d.tau, col);
    out.tau2_pairing[i] = target_inner(d.target_metric, d.tau2, col);
  }
  return out;
}

StressTensors stress_S(const SmoothMap& phi, std::span<const double> p) { return StressEnergy(phi).evaluate(p); }

StressTensors stress_S2(const SmoothMap& phi, std::span<const double> p) { return StressEnergy(phi).evaluate(p); }

DivIdentityResiduals check_div_identities(const StressEnergy& stress, std::span<const std::vector<double>> points) {
  DivIdentityResiduals r;
  for (const auto& p : points) {
    const StressTensors t = stress.evaluate(p);
    for (std::size_t i = 0; i < t.div_S.size(); ++i) {
      r.stress = std::max(r.stress, std::abs(t.div_S[i] + t.tau_pairing[i]));
      r.bistress = std::max(r.bistress, std::abs(t.div_S2[i] + t.tau2_pairing[i]));
    }
    ++r.points;
  }
  return r;
}

DivIdentityResiduals check_div_identities(const SmoothMap& phi, std::span<const std::vector<double>> points) {
  return check_div_identities(StressEnergy(phi), points);
}

LambdaFit fit_lambda(const PointEval& pe, const RealTensor& t) {
  const double gg = tensor_inner(pe.g_inv, pe.g, pe.g);
  LambdaFit fit;
  fit.lambda = tensor_inner(pe.g_inv, t, pe.g) / gg;
  RealTensor rest = t;
  for (std::size_t k = 0; k < rest.size(); ++k) rest.data()[k] -= fit.lambda * pe.g.data()[k];
  fit.residual = tensor_norm(pe.g_inv, rest);
  return fit;
}

std::vector<TransformPair> homothety_transform(const SmoothMap& phi, double t,
                                               std::span<const std::vector<double>> points) {
  if (!(t > 0.0)) throw std::invalid_argument("homothety_transform: t must be positive");
  const StressEnergy original(phi);
  const StressEnergy scaled(phi.with_source(phi.source().with_scaled_metric(Expr(t), phi.source().name() + "*t"),
                                            phi.name() + "@scaled"));
  std::vector<TransformPair> out;
  for (const auto& p : points) out.push_back({original.evaluate(p).S2, scaled.evaluate(p).S2});
  return out;
}

TransformPair homothety_transform(const SmoothMap& phi, double t, std::span<const double> p) {
  const std::vector<std::vector<double>> pts{std::vector<double>(p.begin(), p.end())};
  return homothety_transform(phi, t, pts).front();
}

std::vector<ConformalPair> conformal_surface_transform(const SmoothMap& phi, const Expr& rho,
                                                       std::span<const std::vector<double>> points) {
  if (phi.source().dimension() != 2) throw DimensionMismatch("conformal_surface_transform needs a surface (m = 2)");
  const Expr factor = exp(Expr(2.0) * rho);
  const StressEnergy original(phi);
  const StressEnergy conformal(
      phi.with_source(phi.source().with_scaled_metric(factor, phi.source().name() + "*e^2rho"), phi.name() + "@conf"));
  const Program rho_program(std::vector<Expr>{rho}, phi.source().coords());
  std::vector<ConformalPair> out;
  for (const auto& p : points) {
    const StressTensors a = original.evaluate(p);
    ConformalPair pair;
    pair.original = a.S2;
    pair.transformed = conformal.evaluate(p).S2;
    pair.factor = std::exp(-2.0 * rho_program.evaluate(p).front());
    for (double v : a.tau_pairing) pair.hypothesis_residual = std::max(pair.hypothesis_residual, std::abs(v));
    pair.hypothesis_holds = pair.hypothesis_residual <= kOrthogonalityTolerance;
    out.push_back(std::move(pair));
  }
  return out;
}

ConformalPair conformal_surface_transform(const SmoothMap& phi, const Expr& rho, std::span<const double> p) {
  const std::vector<std::vector<double>> pts{std::vector<double>(p.begin(), p.end())};
  return conformal_surface_transform(phi, rho, pts).front();
}

}  // namespace bitensor
