#include "checks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "bitensor/corpus.hpp"
#include "bitensor/errors.hpp"
#include "bitensor/parse.hpp"
#include "bitensor/quadrature.hpp"
#include "bitensor/sampling.hpp"

namespace bitensor::detail {

namespace {

using nlohmann::json;

constexpr double kInf = std::numeric_limits<double>::infinity();

double euclidean_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double max_abs_difference(const RealTensor& a, const RealTensor& b, double scale_b = 1.0) {
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) worst = std::max(worst, std::abs(a.data()[k] - scale_b * b.data()[k]));
  return worst;
}

double frobenius_difference(const RealTensor& a, const RealTensor& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += (a.data()[k] - b.data()[k]) * (a.data()[k] - b.data()[k]);
  return std::sqrt(s);
}

/// Running max and min of a pointwise quantity.
struct Extremes {
  double largest = 0.0;
  double smallest = kInf;
  void add(double v) {
    largest = std::max(largest, v);
    smallest = std::min(smallest, v);
  }
};

/// Seeded polynomial ambient fields, projected onto the normal bundle.
std::vector<std::vector<Expr>> random_normal_fields(const Immersion& imm, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto& coords = imm.source().coords();
  std::vector<std::vector<Expr>> out;
  for (std::size_t f = 0; f < count; ++f) {
    std::vector<Expr> w;
    for (std::size_t a = 0; a < imm.ambient_dimension(); ++a) {
      Expr c = 2.0 * unit_interval(rng) - 1.0;
      for (const auto& x : coords) c += (2.0 * unit_interval(rng) - 1.0) * Expr::variable(x);
      w.push_back(c);
    }
    out.push_back(imm.normal_projection(w));
  }
  return out;
}

std::vector<std::vector<Expr>> variation_fields(CheckContext& ctx, const Immersion& imm, std::size_t default_count) {
  if (ctx.has("field")) {
    if (ctx.has("random_fields")) throw ConfigError(ctx.key("field"), "give either 'field' or 'random_fields'");
    auto v = ctx.expressions("field", imm.source().coords());
    if (v.size() != imm.ambient_dimension()) {
      throw ConfigError(ctx.key("field"), "expected " + std::to_string(imm.ambient_dimension()) + " components");
    }
    return {v};
  }
  return random_normal_fields(imm, ctx.count("random_fields", default_count), ctx.seed());
}

// ---------------------------------------------------------------- maps

void tension_norm(CheckContext& ctx) {
  const SmoothMap& phi = ctx.map();
  const double expected = ctx.constant("expected");
  double worst = 0.0;
  for (const auto& p : ctx.points(phi.source(), 100)) {
    const MapPointData d = phi.evaluate(p);
    worst = std::max(worst, std::abs(target_norm(d.target_metric, d.tau) - expected));
  }
  ctx.upper("tension_norm_error", worst, ctx.tol(1e-9));
}

void bitension_check(CheckContext& ctx) {
  const SmoothMap& phi = ctx.map();
  const bool compare = ctx.has("expected");
  const double expected = compare ? ctx.constant("expected") : 0.0;
  double worst = 0.0;
  for (const auto& p : ctx.points(phi.source(), 100)) {
    const MapPointData d = phi.evaluate(p);
    worst = std::max(worst, std::abs(target_norm(d.target_metric, d.tau2) - expected));
  }
  ctx.upper(compare ? "bitension_norm_error" : "bitension_norm", worst, ctx.tol(1e-8));
}

void div_identities(CheckContext& ctx) {
  const SmoothMap& phi = ctx.map();
  const auto points = ctx.points(phi.source(), 200);
  const DivIdentityResiduals r = check_div_identities(phi, points);
  const double tol = ctx.tol(1e-8);
  ctx.upper("div_S_plus_tau_pairing", r.stress, tol);
  ctx.upper("div_S2_plus_tau2_pairing", r.bistress, tol);
}

void random_div_identities(CheckContext& ctx) {
  const std::size_t count = ctx.count("count", 50);
  const std::size_t per_map = ctx.count("points", 200);
  double stress = 0.0, bistress = 0.0;
  for (std::size_t k = 0; k < count; ++k) {
    const SmoothMap phi = corpus::random_polynomial_map(ctx.seed() + k);
    const auto points = sample_points(phi.source(), per_map, ctx.seed() + k);
    const DivIdentityResiduals r = check_div_identities(phi, points);
    stress = std::max(stress, r.stress);
    bistress = std::max(bistress, r.bistress);
  }
  ctx.report().points = count * per_map;
  const double tol = ctx.tol(1e-8);
  ctx.upper("div_S_plus_tau_pairing", stress, tol);
  ctx.upper("div_S2_plus_tau2_pairing", bistress, tol);
}

template <class Pick>
void stress_norm(CheckContext& ctx, const char* name, double fallback, Pick pick) {
  const StressEnergy stress(ctx.map());
  double worst = 0.0;
  for (const auto& p : ctx.points(stress.map().source(), 100)) {
    const PointEval pe = stress.map().source().point_eval(p);
    worst = std::max(worst, tensor_norm(pe.g_inv, pick(stress.evaluate(p))));
  }
  ctx.upper(name, worst, ctx.tol(fallback));
}

void s_norm(CheckContext& ctx) {
  stress_norm(ctx, "S_norm", 1e-10, [](const StressTensors& t) { return t.S; });
}

void s2_norm(CheckContext& ctx) {
  stress_norm(ctx, "S2_norm", 1e-9, [](const StressTensors& t) { return t.S2; });
}

void s2_lambda(CheckContext& ctx) {
  const StressEnergy stress(ctx.map());
  const ChartedManifold& M = stress.map().source();
  const double expected = ctx.constant("lambda");
  const bool half_tau = ctx.has("half_tau") && ctx.text("half_tau", "") == "true";
  double lambda_error = 0.0, fit = 0.0, half = 0.0;
  for (const auto& p : ctx.points(M, 100)) {
    const PointEval pe = M.point_eval(p);
    const MapPointData d = stress.map().evaluate(p);
    const StressTensors t = stress.evaluate(d);
    const LambdaFit f = fit_lambda(pe, t.S2);
    lambda_error = std::max(lambda_error, std::abs(f.lambda - expected));
    fit = std::max(fit, f.residual);
    if (half_tau) {
      const double tau_sq = target_inner(d.target_metric, d.tau, d.tau);
      RealTensor diff = t.S2;
      for (std::size_t k = 0; k < diff.size(); ++k) diff.data()[k] -= 0.5 * tau_sq * pe.g.data()[k];
      half = std::max(half, tensor_norm(pe.g_inv, diff));
    }
  }
  const double tol = ctx.tol(1e-9);
  ctx.upper("lambda_error", lambda_error, tol);
  ctx.upper("fit_residual", fit, ctx.tol(1e-10, "fit_tol"));
  if (half_tau) ctx.upper("S2_minus_half_tau_sq_g", half, tol);
}

void homothety(CheckContext& ctx) {
  const SmoothMap& phi = ctx.map();
  const auto factors = ctx.has("factors") ? ctx.numbers("factors") : std::vector<double>{0.5, 2.0, 4.0};
  const auto points = ctx.points(phi.source(), 50);
  double worst = 0.0;
  for (double t : factors) {
    if (!(t > 0.0)) throw ConfigError(ctx.key("factors"), "homothety factors must be positive");
    for (const TransformPair& pair : homothety_transform(phi, t, points)) {
      worst = std::max(worst, max_abs_difference(pair.transformed, pair.original, 1.0 / t));
    }
  }
  ctx.upper("scaled_S2_minus_S2_over_t", worst, ctx.tol(1e-10));
}

void conformal(CheckContext& ctx) {
  const SmoothMap& phi = ctx.map();
  if (phi.source().dimension() != 2) throw ConfigError(ctx.key("subject"), "conformal law needs a surface");
  const Expr rho = ctx.expression("rho", phi.source().coords());
  const auto points = ctx.points(phi.source(), 50);
  double worst = 0.0, hypothesis = 0.0;
  for (const ConformalPair& pair : conformal_surface_transform(phi, rho, points)) {
    worst = std::max(worst, max_abs_difference(pair.transformed, pair.original, pair.factor));
    hypothesis = std::max(hypothesis, pair.hypothesis_residual);
  }
  ctx.upper("conformal_S2_minus_scaled_S2", worst, ctx.tol(1e-8));
  ctx.upper("tau_tangential_pairing", hypothesis, kOrthogonalityTolerance);
}

// ----------------------------------------------------------- manifolds

void killing(CheckContext& ctx) {
  const ChartedManifold& M = ctx.manifold();
  const auto xi = ctx.expressions("field", M.coords());
  if (xi.size() != M.dimension()) {
    throw ConfigError(ctx.key("field"), "expected " + std::to_string(M.dimension()) + " components");
  }
  Extremes e;
  for (const auto& p : ctx.points(M, 100)) {
    const RealTensor L = lie_derivative_metric(M, xi, p);
    double worst = 0.0;
    for (double v : L.data()) worst = std::max(worst, std::abs(v));
    e.add(worst);
  }
  ctx.witness("lie_derivative_metric", e.largest, e.smallest, 1e-12, 1e-3);
}

void integral(CheckContext& ctx) {
  const ChartedManifold& M = ctx.manifold();
  const Immersion* imm = ctx.subject_immersion();
  const std::string what = ctx.text("integrand", "");
  const auto need_immersion = [&] {
    if (imm == nullptr) throw ConfigError(ctx.key("integrand"), "'" + what + "' needs an immersion subject");
    return imm;
  };
  ScalarField f;
  if (what == "one") {
    f = [](std::span<const double>) { return 1.0; };
  } else if (what == "scalar-curvature") {
    f = [&M](std::span<const double> p) { return M.point_eval(p).scalar; };
  } else if (what == "gaussian-curvature") {
    if (M.dimension() != 2) throw ConfigError(ctx.key("integrand"), "Gaussian curvature needs a surface");
    f = [&M](std::span<const double> p) { return 0.5 * M.point_eval(p).scalar; };
  } else if (what == "mean-curvature-squared") {
    const Immersion* i = need_immersion();
    f = [i](std::span<const double> p) { return i->evaluate(p).H_norm_sq; };
  } else if (what == "gauss-energy") {
    const Immersion* i = need_immersion();
    f = [i](std::span<const double> p) { return i->evaluate(p).gauss_energy; };
  } else {
    const Expr e = ctx.expression("integrand", M.coords());
    const Program program(std::span<const Expr>(&e, 1), M.coords());
    f = [program](std::span<const double> p) { return program.evaluate(p)[0]; };
  }
  const double expected = ctx.constant("expected");
  const auto sizes = ctx.grid();
  const IntegralResult r = integrate(M, f, sizes);
  ctx.report().points = r.nodes;
  const double tol = ctx.tol(1e-6);
  ctx.upper("integral_error", std::abs(r.value - expected), tol);
  ctx.upper("refinement_change", r.change, 10.0 * tol);
}

// ---------------------------------------------------------- immersions

void gauss_oracle(CheckContext& ctx) {
  const Immersion& imm = ctx.immersion();
  const PlueckerOracle oracle(imm);
  const PlueckerOracle rotated(imm, ctx.number("rotation", 0.7));
  double formula = 0.0, frame = 0.0;
  for (const auto& p : ctx.points(imm.source(), 100)) {
    const RealTensor o = oracle.pullback(p);
    formula = std::max(formula, frobenius_difference(imm.evaluate(p).gauss_pullback, o));
    frame = std::max(frame, frobenius_difference(rotated.pullback(p), o));
  }
  ctx.upper("formula_minus_pluecker", formula, ctx.tol(1e-7));
  ctx.upper("frame_rotation_change", frame, ctx.tol(1e-9, "frame_tol"));
}

void gauss_divergence(CheckContext& ctx) {
  const Immersion& imm = ctx.immersion();
  const StressEnergy stress(imm.inclusion());
  double worst = 0.0;
  for (const auto& p : ctx.points(imm.source(), 100)) worst = std::max(worst, gauss_divergence_relation(imm, stress, p));
  ctx.upper("div_SG_half_div_S2_quarter_d_tau_sq", worst, ctx.tol(1e-7));
}

void cmc_divergence(CheckContext& ctx) {
  const Immersion& imm = ctx.immersion();
  const StressEnergy stress(imm.inclusion());
  double s2 = 0.0, sg = 0.0;
  std::vector<double> div_sg, d_tau_sq;
  for (const auto& p : ctx.points(imm.source(), 100)) {
    s2 = std::max(s2, euclidean_norm(stress.evaluate(p).div_S2));
    imm.gauss_divergence(p, div_sg, d_tau_sq);
    sg = std::max(sg, euclidean_norm(div_sg));
  }
  const double tol = ctx.tol(1e-8);
  ctx.upper("div_S2_norm", s2, tol);
  ctx.upper("div_SG_norm", sg, tol);
}

void equivalence_chain(CheckContext& ctx) {
  const Immersion& imm = ctx.immersion();
  if (imm.dimension() != 2) throw ConfigError(ctx.key("subject"), "the equivalence chain is stated for surfaces");
  const StressEnergy stress(imm.inclusion());
  Extremes sg, conf, pu, half;
  for (const auto& p : ctx.points(imm.source(), 100)) {
    const EquivalenceResiduals r = equivalence_residuals(imm, stress, p);
    sg.add(r.gauss_stress);
    conf.add(r.gauss_conformality);
    pu.add(r.pseudo_umbilicity);
    half.add(r.bistress_half_tau);
  }
  ctx.witness("gauss_stress", sg.largest, sg.smallest, 1e-8, 1e-3);
  ctx.witness("gauss_conformality", conf.largest, conf.smallest, 1e-8, 1e-3);
  ctx.witness("pseudo_umbilicity", pu.largest, pu.smallest, 1e-8, 1e-3);
  ctx.witness("S2_minus_half_tau_sq_g", half.largest, half.smallest, 1e-8, 1e-3);
}

void willmore(CheckContext& ctx) {
  const Immersion& imm = ctx.immersion();
  if (imm.dimension() != 2) throw ConfigError(ctx.key("subject"), "the Willmore gradient is defined for surfaces");
  Extremes e;
  for (const auto& p : ctx.points(imm.source(), 100)) e.add(euclidean_norm(willmore_gradient(imm, p)));
  ctx.witness("willmore_gradient_norm", e.largest, e.smallest, 1e-10, 1e-2);
}

void pseudo_umbilic(CheckContext& ctx) {
  const Immersion& imm = ctx.immersion();
  Extremes e;
  for (const auto& p : ctx.points(imm.source(), 100)) {
    const SubmanifoldPointData d = imm.evaluate(p);
    e.add(tensor_norm(d.g_inv, d.pseudo_umbilic_residual));
  }
  ctx.witness("pseudo_umbilic_residual", e.largest, e.smallest, 1e-10, 1e-3);
}

void ruh_vilms(CheckContext& ctx) {
  const Immersion& imm = ctx.immersion();
  Extremes e;
  for (const auto& p : ctx.points(imm.source(), 100)) e.add(ruh_vilms_residual(imm, p));
  ctx.witness("normal_derivative_of_H", e.largest, e.smallest, 1e-9, 1e-3);
}

void mean_curvature(CheckContext& ctx) {
  const Immersion& imm = ctx.immersion();
  const double expected = ctx.constant("expected");
  double worst = 0.0;
  for (const auto& p : ctx.points(imm.source(), 100)) {
    worst = std::max(worst, std::abs(std::sqrt(imm.evaluate(p).H_norm_sq) - expected));
  }
  ctx.upper("mean_curvature_norm_error", worst, ctx.tol(1e-10));
}

// r = |τ|² − 2e(G) holds pointwise (trace of G*g_can); r itself is constant
// only on homogeneous members, so the spread is a separate residual.
void scalar_curvature(CheckContext& ctx) {
  const Immersion& imm = ctx.immersion();
  double identity = 0.0, lo = INFINITY, hi = -INFINITY;
  for (const auto& p : ctx.points(imm.source(), 100)) {
    const SubmanifoldPointData sd = imm.evaluate(p);
    double tau_sq = 0.0;
    for (double t : imm.inclusion().evaluate(p).tau) tau_sq += t * t;
    identity = std::max(identity, std::abs(sd.scalar - (tau_sq - 2.0 * sd.gauss_energy)));
    lo = std::min(lo, sd.scalar);
    hi = std::max(hi, sd.scalar);
  }
  ctx.upper("scalar_minus_tau_sq_plus_2eG", identity, ctx.tol(1e-9));
  ctx.upper("scalar_spread", hi - lo, ctx.tol(1e-9, "spread_tol"));
}

void omega(CheckContext& ctx) {
  const Immersion& imm = ctx.immersion();
  const auto fields = variation_fields(ctx, imm, 5);
  const double step = ctx.number("step", 1e-4);
  const auto points = ctx.points(imm.source(), 20);
  double worst = 0.0;
  for (const auto& V : fields) {
    for (const auto& p : points) {
      const OmegaComparison c = variation_omega_check(imm, V, p, step);
      worst = std::max(worst, max_abs_difference(c.fd_omega, c.formula_omega));
    }
  }
  ctx.upper("finite_difference_minus_formula", worst, ctx.tol(1e-6));
}

void weiner(CheckContext& ctx) {
  const Immersion& imm = ctx.immersion();
  if (imm.dimension() != 2) throw ConfigError(ctx.key("subject"), "the Weiner chain is stated for surfaces");
  const auto fields = variation_fields(ctx, imm, 20);
  const auto points = ctx.points(imm.source(), 20);
  double variation = 0.0, traceless = 0.0;
  for (const auto& V : fields) {
    for (const auto& p : points) {
      const WeinerResiduals r = weiner_algebra_check(imm, V, p);
      variation = std::max(variation, r.variation);
      traceless = std::max(traceless, r.traceless);
    }
  }
  const double tol = ctx.tol(1e-9);
  ctx.upper("variation_identity", variation, tol);
  ctx.upper("traceless_identity", traceless, tol);
}

void gauss_bonnet(CheckContext& ctx) {
  const Immersion& imm = ctx.immersion();
  const ChartedManifold& M = imm.source();
  const auto sizes = ctx.grid();
  const IntegralResult eg = integrate(M, [&](std::span<const double> p) { return imm.evaluate(p).gauss_energy; }, sizes);
  const IntegralResult h2 = integrate(M, [&](std::span<const double> p) { return imm.evaluate(p).H_norm_sq; }, sizes);
  const EulerCharacteristic chi = euler_characteristic(imm, sizes);
  ctx.report().points = eg.nodes;
  const double tol = ctx.tol(1e-5);
  ctx.upper("integral_identity", std::abs(eg.value - 2.0 * h2.value + 2.0 * std::numbers::pi * chi.chi), tol);
  ctx.upper("gauss_energy_refinement_change", eg.change, 10.0 * tol);
  ctx.upper("willmore_refinement_change", h2.change, 10.0 * tol);
  ctx.upper("euler_rounding_gap", std::abs(chi.raw - chi.chi), kEulerRoundingGap);
}

void euler_check(CheckContext& ctx) {
  const Immersion& imm = ctx.immersion();
  const double expected = ctx.constant("expected");
  const EulerCharacteristic chi = euler_characteristic(imm, ctx.grid());
  ctx.upper("euler_characteristic_error", std::abs(chi.chi - expected), 0.0);
  ctx.upper("euler_rounding_gap", std::abs(chi.raw - chi.chi), kEulerRoundingGap);
}

const std::vector<CheckEntry>& registry() {
  using enum SubjectKind;
  static const std::vector<CheckEntry> entries{
      {"tension-norm", Map, {"expected", "points", "tol"}, tension_norm},
      {"bitension", Map, {"expected", "points", "tol"}, bitension_check},
      {"div-identities", Map, {"points", "tol"}, div_identities},
      {"random-div-identities", None, {"count", "points", "tol"}, random_div_identities},
      {"s-norm", Map, {"points", "tol"}, s_norm},
      {"s2-norm", Map, {"points", "tol"}, s2_norm},
      {"s2-lambda", Map, {"lambda", "half_tau", "points", "tol", "fit_tol"}, s2_lambda},
      {"homothety", Map, {"factors", "points", "tol"}, homothety},
      {"conformal", Map, {"rho", "points", "tol"}, conformal},
      {"killing", Manifold, {"field", "expect", "points", "tol"}, killing},
      {"integral", Manifold, {"integrand", "expected", "grid", "tol"}, integral},
      {"gauss-oracle", Immersion, {"rotation", "points", "tol", "frame_tol"}, gauss_oracle},
      {"gauss-divergence", Immersion, {"points", "tol"}, gauss_divergence},
      {"cmc-divergence", Immersion, {"points", "tol"}, cmc_divergence},
      {"equivalence-chain", Immersion, {"expect", "points", "tol"}, equivalence_chain},
      {"willmore-gradient", Immersion, {"expect", "points", "tol"}, willmore},
      {"pseudo-umbilic", Immersion, {"expect", "points", "tol"}, pseudo_umbilic},
      {"ruh-vilms", Immersion, {"expect", "points", "tol"}, ruh_vilms},
      {"mean-curvature", Immersion, {"expected", "points", "tol"}, mean_curvature},
      {"scalar-curvature", Immersion, {"points", "tol", "spread_tol"}, scalar_curvature},
      {"omega", Immersion, {"field", "random_fields", "step", "points", "tol"}, omega},
      {"weiner", Immersion, {"field", "random_fields", "points", "tol"}, weiner},
      {"gauss-bonnet", Immersion, {"grid", "tol"}, gauss_bonnet},
      {"euler-characteristic", Immersion, {"expected", "grid"}, euler_check},
  };
  return entries;
}

}  // namespace

std::span<const CheckEntry> check_registry() { return registry(); }

const CheckEntry* find_check(std::string_view kind) {
  for (const CheckEntry& e : registry()) {
    if (e.kind == kind) return &e;
  }
  return nullptr;
}

// ------------------------------------------------------------ context

CheckContext::CheckContext(const Scenario& scenario, const CheckSpec& spec, const RunOptions& options,
                           CheckReport& report)
    : scenario_(scenario), spec_(spec), options_(options), report_(report) {}

std::string CheckContext::key(std::string_view k) const {
  return "check[" + std::to_string(spec_.index) + "]." + std::string(k);
}

bool CheckContext::has(std::string_view k) const { return spec_.params.contains(k); }

const json& CheckContext::get(std::string_view k) const {
  const auto it = spec_.params.find(k);
  if (it == spec_.params.end()) throw ConfigError(key(k), "missing required parameter");
  return *it;
}

double CheckContext::number(std::string_view k, double fallback) const {
  if (!has(k)) return fallback;
  const json& v = get(k);
  if (!v.is_number()) throw ConfigError(key(k), "expected a number");
  return v.get<double>();
}

double CheckContext::constant(std::string_view k) const {
  const json& v = get(k);
  if (v.is_number()) return v.get<double>();
  if (!v.is_string()) throw ConfigError(key(k), "expected a number or a constant expression");
  try {
    return evaluate(parse(v.get<std::string>(), {}), {});
  } catch (const std::exception& e) {
    throw ConfigError(key(k), e.what());
  }
}

std::size_t CheckContext::count(std::string_view k, std::size_t fallback) const {
  if (!has(k)) return fallback;
  const json& v = get(k);
  if (!v.is_number_integer() || v.get<std::int64_t>() <= 0) throw ConfigError(key(k), "expected a positive integer");
  return v.get<std::size_t>();
}

std::string CheckContext::text(std::string_view k, std::string fallback) const {
  if (!has(k)) return fallback;
  const json& v = get(k);
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (!v.is_string()) throw ConfigError(key(k), "expected a string");
  return v.get<std::string>();
}

std::vector<double> CheckContext::numbers(std::string_view k) const {
  const json& v = get(k);
  if (!v.is_array() || v.empty()) throw ConfigError(key(k), "expected a non-empty array of numbers");
  std::vector<double> out;
  for (const json& e : v) {
    if (!e.is_number()) throw ConfigError(key(k), "expected a non-empty array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

Expr CheckContext::expression(std::string_view k, const std::vector<std::string>& vars) const {
  const json& v = get(k);
  if (v.is_number()) return Expr::constant(v.get<double>());
  if (!v.is_string()) throw ConfigError(key(k), "expected an expression string");
  try {
    return parse(v.get<std::string>(), vars);
  } catch (const ParseError& e) {
    throw ConfigError(key(k), e.what());
  }
}

std::vector<Expr> CheckContext::expressions(std::string_view k, const std::vector<std::string>& vars) const {
  const json& v = get(k);
  if (!v.is_array()) throw ConfigError(key(k), "expected an array of expression strings");
  std::vector<Expr> out;
  for (const json& e : v) {
    if (e.is_number()) {
      out.push_back(Expr::constant(e.get<double>()));
      continue;
    }
    if (!e.is_string()) throw ConfigError(key(k), "expected an array of expression strings");
    try {
      out.push_back(parse(e.get<std::string>(), vars));
    } catch (const ParseError& err) {
      throw ConfigError(key(k), err.what());
    }
  }
  return out;
}

bool CheckContext::expect_hold() const {
  const std::string e = text("expect", "hold");
  if (e == "hold") return true;
  if (e == "fail") return false;
  throw ConfigError(key("expect"), "expected \"hold\" or \"fail\"");
}

double CheckContext::tol(double fallback, std::string_view k) const {
  if (!has(k)) return fallback;
  const double t = number(k, fallback);
  if (!(t >= 0.0)) throw ConfigError(key(k), "tolerance must be non-negative");
  return t;
}

std::vector<std::vector<double>> CheckContext::points(const ChartedManifold& manifold, std::size_t fallback) {
  std::vector<std::vector<double>> out;
  if (has("points") && get("points").is_array()) {
    for (const json& p : get("points")) {
      if (!p.is_array() || p.size() != manifold.dimension()) {
        throw ConfigError(key("points"), "each point needs " + std::to_string(manifold.dimension()) + " coordinates");
      }
      std::vector<double> q;
      for (const json& x : p) {
        if (!x.is_number()) throw ConfigError(key("points"), "coordinates must be numbers");
        q.push_back(x.get<double>());
      }
      out.push_back(std::move(q));
    }
    if (out.empty()) throw ConfigError(key("points"), "empty point list");
  } else {
    out = sample_points(manifold, count("points", fallback), report_.seed);
  }
  report_.points = out.size();
  return out;
}

std::vector<std::size_t> CheckContext::grid() {
  std::vector<std::size_t> sizes;
  if (options_.grid) {
    sizes = {*options_.grid};
  } else if (has("grid")) {
    const json& v = get("grid");
    if (v.is_number_integer()) {
      sizes = {count("grid", 1)};
    } else if (v.is_array()) {
      for (const json& e : v) {
        if (!e.is_number_integer() || e.get<std::int64_t>() <= 0) {
          throw ConfigError(key("grid"), "expected positive node counts");
        }
        sizes.push_back(e.get<std::size_t>());
      }
    } else {
      throw ConfigError(key("grid"), "expected a node count or a list of node counts");
    }
  }
  report_.grid = sizes;
  return sizes;
}

const SmoothMap& CheckContext::map() const {
  if (auto it = scenario_.maps.find(spec_.subject); it != scenario_.maps.end()) return it->second;
  return scenario_.immersions.at(spec_.subject).inclusion();
}

const Immersion& CheckContext::immersion() const { return scenario_.immersions.at(spec_.subject); }

const Immersion* CheckContext::subject_immersion() const {
  const auto it = scenario_.immersions.find(spec_.subject);
  return it == scenario_.immersions.end() ? nullptr : &it->second;
}

const ChartedManifold& CheckContext::manifold() const {
  if (auto it = scenario_.manifolds.find(spec_.subject); it != scenario_.manifolds.end()) return *it->second;
  if (const Immersion* imm = subject_immersion()) return imm->source();
  return scenario_.maps.at(spec_.subject).source();
}

void CheckContext::upper(std::string name, double value, double tolerance) {
  report_.residuals.push_back({std::move(name), value, tolerance * options_.tol_scale, Bound::Upper});
}

void CheckContext::lower(std::string name, double value, double tolerance) {
  report_.residuals.push_back({std::move(name), value, tolerance, Bound::Lower});
}

void CheckContext::witness(std::string name, double largest, double smallest, double hold, double fail) {
  if (expect_hold()) {
    upper(std::move(name), largest, tol(hold));
  } else {
    lower(std::move(name), smallest, tol(fail));
  }
}

}  // namespace bitensor::detail
