#include "bitensor/corpus.hpp"

#include <numbers>
#include <random>

#include "bitensor/errors.hpp"
#include "bitensor/parse.hpp"
#include "bitensor/sampling.hpp"

namespace bitensor::corpus {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kHighSpherePolarMargin = 0.15;

std::vector<Expr> parse_all(std::initializer_list<std::string_view> sources, const std::vector<std::string>& vars) {
  std::vector<Expr> out;
  for (auto s : sources) out.push_back(parse(s, vars));
  return out;
}

std::vector<Expr> diagonal_upper(const std::vector<Expr>& diag) {
  std::vector<Expr> upper;
  for (std::size_t i = 0; i < diag.size(); ++i) {
    for (std::size_t j = i; j < diag.size(); ++j) upper.push_back(i == j ? diag[i] : Expr());
  }
  return upper;
}

ManifoldPtr euclidean_target(std::size_t n) {
  std::vector<std::string> coords;
  for (std::size_t a = 1; a <= n; ++a) coords.push_back("y" + std::to_string(a));
  return ChartedManifold::euclidean("R" + std::to_string(n), std::move(coords));
}

double coefficient(std::mt19937_64& rng) { return 2.0 * unit_interval(rng) - 1.0; }

}  // namespace

ManifoldPtr flat(std::string name, std::vector<std::string> coords, std::vector<CoordinateRange> domain) {
  std::vector<Expr> ones(coords.size(), Expr(1.0));
  return std::make_shared<ChartedManifold>(std::move(name), std::move(coords), std::move(domain), diagonal_upper(ones));
}

ManifoldPtr round_sphere(double radius) {
  const std::vector<std::string> c{"theta", "phi"};
  const Expr r2(radius * radius);
  return std::make_shared<ChartedManifold>(
      "S2(" + std::to_string(radius) + ")", c,
      std::vector<CoordinateRange>{{0.0, kPi, CoordinateKind::Polar}, {0.0, 2.0 * kPi, CoordinateKind::Periodic}},
      diagonal_upper({r2, r2 * pow(sin(Expr::variable("theta")), 2.0)}));
}

ManifoldPtr flat_torus() {
  return flat("T2", {"u", "v"},
              {{0.0, 2.0 * kPi, CoordinateKind::Periodic}, {0.0, 2.0 * kPi, CoordinateKind::Periodic}});
}

ManifoldPtr small_sphere() {
  const std::vector<std::string> c{"beta", "gamma"};
  return std::make_shared<ChartedManifold>(
      "S2(1/sqrt2)", c,
      std::vector<CoordinateRange>{{0.0, kPi, CoordinateKind::Polar}, {0.0, 2.0 * kPi, CoordinateKind::Periodic}},
      diagonal_upper(parse_all({"1/2", "sin(beta)^2/2"}, c)));
}

ManifoldPtr round_three_sphere() {
  const std::vector<std::string> c{"alpha", "beta", "gamma"};
  return std::make_shared<ChartedManifold>(
      "S3", c,
      std::vector<CoordinateRange>{{0.0, kPi, CoordinateKind::Polar},
                                   {0.0, kPi, CoordinateKind::Polar},
                                   {0.0, 2.0 * kPi, CoordinateKind::Periodic}},
      diagonal_upper(parse_all({"1", "sin(alpha)^2", "sin(alpha)^2*sin(beta)^2"}, c)));
}

ManifoldPtr line(std::string coord, double lo, double hi) {
  return flat("R[" + std::to_string(lo) + "," + std::to_string(hi) + "]", {std::move(coord)},
              {{lo, hi, CoordinateKind::Bounded}});
}

ManifoldPtr warped_product(double c) {
  const std::vector<std::string> v{"t", "x", "y"};
  const Expr w = exp(Expr(2.0 * c) * Expr::variable("t"));
  return std::make_shared<ChartedManifold>("warped(c=" + std::to_string(c) + ")", v,
                                           std::vector<CoordinateRange>(3, {-1.0, 1.0, CoordinateKind::Bounded}),
                                           diagonal_upper({Expr(1.0), w, w}));
}

ManifoldPtr perturbed_metric(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Expr x = Expr::variable("x"), y = Expr::variable("y"), z = Expr::variable("z");
  const std::vector<Expr> waves{sin(x), sin(y), sin(z), sin(x + y), sin(y - z), sin(x + z)};
  auto combo = [&](double scale) {
    Expr s;
    for (const Expr& w : waves) s += Expr(scale * coefficient(rng)) * w;
    return s;
  };
  // diagonal entries stay in [0.4, 1.6], off-diagonal below 0.09
  std::vector<Expr> upper;
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = i; j < 3; ++j) upper.push_back(i == j ? Expr(1.0) + combo(0.1) : combo(0.015));
  }
  return std::make_shared<ChartedManifold>("perturbed(" + std::to_string(seed) + ")",
                                           std::vector<std::string>{"x", "y", "z"},
                                           std::vector<CoordinateRange>(3, {-1.0, 1.0, CoordinateKind::Bounded}),
                                           std::move(upper));
}

Immersion sphere(std::size_t m, double radius) {
  if (m < 1) throw DimensionMismatch("sphere needs m >= 1");
  std::vector<std::string> coords;
  if (m == 2) {
    coords = {"theta", "phi"};
  } else {
    for (std::size_t k = 1; k < m; ++k) coords.push_back("a" + std::to_string(k));
    coords.push_back("phi");
  }
  // Beyond m = 2 the chart is a patch: det g carries sin^(2(m-k)) of each
  // polar angle and would fall below the degeneracy threshold near the poles.
  std::vector<CoordinateRange> domain(m - 1, m == 2 ? CoordinateRange{0.0, kPi, CoordinateKind::Polar}
                                                    : CoordinateRange{kHighSpherePolarMargin,
                                                                      kPi - kHighSpherePolarMargin,
                                                                      CoordinateKind::Bounded});
  domain.push_back({0.0, 2.0 * kPi, CoordinateKind::Periodic});

  // X_{m+1} = R cos a1, X_m = R sin a1 cos a2, ..., X_1 = R sin a1 ... sin a_{m-1} cos phi
  std::vector<Expr> embedding(m + 1);
  std::vector<Expr> diag(m);
  Expr prefix(radius);
  for (std::size_t k = 0; k + 1 < m; ++k) {
    const Expr a = Expr::variable(coords[k]);
    embedding[m - k] = prefix * cos(a);
    diag[k] = prefix * prefix;
    prefix = prefix * sin(a);
  }
  const Expr phi = Expr::variable(coords.back());
  embedding[0] = prefix * cos(phi);
  embedding[1] = prefix * sin(phi);
  diag[m - 1] = prefix * prefix;

  auto source = std::make_shared<ChartedManifold>("S" + std::to_string(m) + "(" + std::to_string(radius) + ")", coords,
                                                  std::move(domain), diagonal_upper(diag));
  return Immersion("S" + std::to_string(m) + "(" + std::to_string(radius) + ") in R" + std::to_string(m + 1),
                   std::move(source), std::move(embedding));
}

Immersion clifford_torus() {
  const std::vector<std::string> c{"u", "v"};
  auto source = std::make_shared<ChartedManifold>(
      "clifford", c,
      std::vector<CoordinateRange>(2, {0.0, 2.0 * kPi, CoordinateKind::Periodic}),
      diagonal_upper({Expr(0.5), Expr(0.5)}));
  return Immersion("clifford torus", std::move(source),
                   parse_all({"cos(u)/sqrt(2)", "sin(u)/sqrt(2)", "cos(v)/sqrt(2)", "sin(v)/sqrt(2)"}, c));
}

Immersion cylinder() {
  const std::vector<std::string> c{"u", "v"};
  auto source = flat("cylinder", c, {{0.0, 2.0 * kPi, CoordinateKind::Periodic}, {-1.0, 1.0, CoordinateKind::Bounded}});
  return Immersion("cylinder", std::move(source), parse_all({"cos(u)", "sin(u)", "v"}, c));
}

Immersion torus_of_revolution(double a, double b) {
  const Expr u = Expr::variable("u"), v = Expr::variable("v");
  const Expr ring = Expr(a) + Expr(b) * cos(v);
  auto source = std::make_shared<ChartedManifold>(
      "torus(" + std::to_string(a) + "," + std::to_string(b) + ")", std::vector<std::string>{"u", "v"},
      std::vector<CoordinateRange>(2, {0.0, 2.0 * kPi, CoordinateKind::Periodic}),
      diagonal_upper({pow(ring, 2.0), Expr(b * b)}));
  return Immersion("torus of revolution", std::move(source),
                   {ring * cos(u), ring * sin(u), Expr(b) * sin(v)});
}

Immersion paraboloid() {
  const std::vector<std::string> c{"x", "y"};
  return Immersion::induced("paraboloid", c, std::vector<CoordinateRange>(2, {-1.0, 1.0, CoordinateKind::Bounded}),
                            parse_all({"x", "y", "x^2 + y^2"}, c));
}

Immersion random_graph_surface(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Expr x = Expr::variable("x"), y = Expr::variable("y");
  Expr z;
  for (int deg = 2; deg <= 3; ++deg) {
    for (int i = 0; i <= deg; ++i) z += Expr(coefficient(rng)) * pow(x, i) * pow(y, deg - i);
  }
  return Immersion::induced("graph(" + std::to_string(seed) + ")", {"x", "y"},
                            std::vector<CoordinateRange>(2, {-1.0, 1.0, CoordinateKind::Bounded}), {x, y, z});
}

SmoothMap small_sphere_inclusion() {
  const std::vector<std::string> c{"beta", "gamma"};
  return SmoothMap("small sphere inclusion", small_sphere(), round_three_sphere(), parse_all({"pi/4", "beta", "gamma"}, c));
}

SmoothMap warped_projection(double c) {
  return SmoothMap("warped projection", warped_product(c), ChartedManifold::euclidean("R", {"s"}),
                   {Expr::variable("t")});
}

SmoothMap cubic_curve() {
  return SmoothMap("cubic curve", line("t", 0.5, 2.0), euclidean_target(2), parse_all({"t^3", "0"}, {"t"}));
}

SmoothMap circle(double a) {
  const Expr s = Expr::variable("s");
  auto source = flat("circle domain", {"s"}, {{0.0, 2.0 * kPi * a, CoordinateKind::Periodic}});
  return SmoothMap("circle(" + std::to_string(a) + ")", std::move(source), euclidean_target(2),
                   {Expr(a) * cos(s / Expr(a)), Expr(a) * sin(s / Expr(a))});
}

SmoothMap holomorphic_square() {
  const std::vector<std::string> c{"x", "y"};
  auto source = flat("square patch", c, std::vector<CoordinateRange>(2, {0.2, 1.2, CoordinateKind::Bounded}));
  return SmoothMap("holomorphic square", std::move(source), euclidean_target(2), parse_all({"x^2 - y^2", "2*x*y"}, c));
}

SmoothMap identity(const ManifoldPtr& manifold) {
  std::vector<Expr> components;
  for (const auto& c : manifold->coords()) components.push_back(Expr::variable(c));
  return SmoothMap("id_" + manifold->name(), manifold, manifold, std::move(components));
}

SmoothMap constant(const ManifoldPtr& source, const ManifoldPtr& target, const std::vector<double>& value) {
  std::vector<Expr> components;
  for (double v : value) components.emplace_back(v);
  return SmoothMap("constant", source, target, std::move(components));
}

SmoothMap random_polynomial_map(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const Expr x = Expr::variable("x"), y = Expr::variable("y");
  std::vector<Expr> components(3);
  for (Expr& comp : components) {
    for (int deg = 0; deg <= 3; ++deg) {
      for (int i = 0; i <= deg; ++i) comp += Expr(coefficient(rng)) * pow(x, i) * pow(y, deg - i);
    }
  }
  auto source = flat("R2 box", {"x", "y"}, std::vector<CoordinateRange>(2, {-1.0, 1.0, CoordinateKind::Bounded}));
  return SmoothMap("random polynomial(" + std::to_string(seed) + ")", std::move(source), euclidean_target(3),
                   std::move(components));
}

}  // namespace bitensor::corpus
