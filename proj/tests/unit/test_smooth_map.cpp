#include <doctest.h>

#include <cmath>
#include <numbers>

#include "bitensor/corpus.hpp"
#include "bitensor/errors.hpp"
#include "bitensor/parse.hpp"
#include "bitensor/sampling.hpp"

using namespace bitensor;

namespace {

double norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double max_abs(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s = std::max(s, std::abs(x));
  return s;
}

std::shared_ptr<const ChartedManifold> unit_sphere_beta_gamma() {
  const std::vector<std::string> c{"beta", "gamma"};
  return std::make_shared<ChartedManifold>(
      "S2", c,
      std::vector<CoordinateRange>{{0.0, std::numbers::pi, CoordinateKind::Polar},
                                   {0.0, 2 * std::numbers::pi, CoordinateKind::Periodic}},
      std::vector<Expr>{Expr(1.0), Expr(0.0), parse("sin(beta)^2", c)});
}

}  // namespace

TEST_CASE("first-order quantities") {
  SUBCASE("identity on the round sphere") {
    const auto S = corpus::round_sphere(1.0);
    const SmoothMap id = corpus::identity(S);
    for (const auto& p : sample_points(*S, 10, 1)) {
      const MapPointData d = id.evaluate(p);
      const PointEval pe = S->point_eval(p);
      CHECK(d.energy_density == doctest::Approx(1.0).epsilon(1e-14));
      for (std::size_t k = 0; k < 4; ++k) CHECK(std::abs(d.pullback_metric.data()[k] - pe.g.data()[k]) <= 1e-14);
    }
  }
  SUBCASE("holomorphic square is weakly conformal") {
    const SmoothMap sq = corpus::holomorphic_square();
    for (const auto& p : sample_points(sq.source(), 20, 2)) {
      const MapPointData d = sq.evaluate(p);
      const double r2 = p[0] * p[0] + p[1] * p[1];
      CHECK(d.energy_density == doctest::Approx(4 * r2).epsilon(1e-14));
      CHECK(d.pullback_metric(0, 0) == doctest::Approx(4 * r2).epsilon(1e-14));
      CHECK(d.pullback_metric(1, 1) == doctest::Approx(4 * r2).epsilon(1e-14));
      CHECK(std::abs(d.pullback_metric(0, 1)) <= 1e-14);
    }
  }
  SUBCASE("constant map") {
    const auto S = corpus::round_sphere(1.0);
    const SmoothMap c = corpus::constant(S, corpus::round_three_sphere(), {1.0, 2.0, 0.5});
    const MapPointData d = c.evaluate(std::vector<double>{1.0, 1.0});
    CHECK(d.energy_density == 0.0);
    CHECK(max_abs(d.pullback_metric.data()) == 0.0);
    CHECK(max_abs(d.tau) == 0.0);
    CHECK(max_abs(d.tau2) == 0.0);
  }
}

TEST_CASE("tension field examples") {
  SUBCASE("identity map is harmonic") {
    const auto S = corpus::round_sphere(2.0);
    const SmoothMap id = corpus::identity(S);
    for (const auto& p : sample_points(*S, 20, 3)) {
      const MapPointData d = id.evaluate(p);
      CHECK(norm(d.tau) <= 1e-12);
      CHECK(norm(d.tau2) <= 1e-7);
    }
  }
  SUBCASE("cubic curve") {
    const SmoothMap gamma = corpus::cubic_curve();
    for (double t : {0.5, 1.0, 1.7, 2.0}) {
      const MapPointData d = gamma.evaluate(std::vector<double>{t});
      CHECK(d.tau[0] == doctest::Approx(6 * t).epsilon(1e-14));
      CHECK(d.tau[1] == 0.0);
      CHECK(d.tau2[0] == 0.0);
    }
  }
  SUBCASE("small sphere inclusion is proper biharmonic") {
    const SmoothMap inc = corpus::small_sphere_inclusion();
    for (const auto& p : sample_points(inc.source(), 50, 4)) {
      const MapPointData d = inc.evaluate(p);
      CHECK(target_norm(d.target_metric, d.tau) == doctest::Approx(2.0).epsilon(1e-12));
      CHECK(target_norm(d.target_metric, d.tau2) <= 1e-8);
    }
  }
  SUBCASE("circle of radius a") {
    for (double a : {0.5, 1.0, 3.0}) {
      const SmoothMap c = corpus::circle(a);
      for (const auto& p : sample_points(c.source(), 10, 5)) {
        const MapPointData d = c.evaluate(p);
        const double s = p[0];
        // γ'' = −(1/a)(cos(s/a), sin(s/a)), γ'''' = (1/a³)(cos(s/a), sin(s/a))
        CHECK(d.tau[0] == doctest::Approx(-std::cos(s / a) / a).epsilon(1e-12));
        CHECK(d.tau2[1] == doctest::Approx(std::sin(s / a) / (a * a * a)).epsilon(1e-12));
        CHECK(norm(d.tau) == doctest::Approx(1 / a).epsilon(1e-12));
        CHECK(norm(d.tau2) == doctest::Approx(1 / (a * a * a)).epsilon(1e-12));
      }
    }
  }
  SUBCASE("warped-product projection") {
    for (double c : {-0.4, 0.7}) {
      const SmoothMap pi = corpus::warped_projection(c);
      for (const auto& p : sample_points(pi.source(), 30, 6)) {
        const MapPointData d = pi.evaluate(p);
        CHECK(std::abs(d.tau[0]) == doctest::Approx(2 * std::abs(c)).epsilon(1e-12));
        CHECK(std::abs(d.tau2[0]) <= 1e-8);
      }
    }
  }
}

TEST_CASE("second fundamental form symmetry and trace consistency") {
  std::vector<SmoothMap> maps{corpus::small_sphere_inclusion(), corpus::warped_projection(0.7),
                              corpus::holomorphic_square(), corpus::random_polynomial_map(1),
                              corpus::random_polynomial_map(2)};
  for (const auto& phi : maps) {
    CAPTURE(phi.name());
    const std::size_t m = phi.source().dimension(), n = phi.target().dimension();
    for (const auto& p : sample_points(phi.source(), 15, 7)) {
      const MapPointData d = phi.evaluate(p);
      const PointEval pe = phi.source().point_eval(p);
      for (std::size_t a = 0; a < n; ++a) {
        double trace = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
          for (std::size_t j = 0; j < m; ++j) {
            CHECK(std::abs(d.nabla_dphi(a, i, j) - d.nabla_dphi(a, j, i)) <= 1e-10);
            trace += pe.g_inv(i, j) * d.nabla_dphi(a, i, j);
          }
        }
        CHECK(std::abs(trace - d.tau[a]) <= 1e-12 * std::max(1.0, std::abs(trace)));
      }
    }
  }
}

TEST_CASE("flat fast path agrees with the general path") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const SmoothMap fast = corpus::random_polynomial_map(seed);
    const SmoothMap general("general", fast.source_ptr(), fast.target_ptr(), fast.components(), TargetPath::General);
    for (const auto& p : sample_points(fast.source(), 10, seed)) {
      const MapPointData a = fast.evaluate(p), b = general.evaluate(p);
      for (std::size_t k = 0; k < a.tau.size(); ++k) {
        CHECK(std::abs(a.tau[k] - b.tau[k]) <= 1e-12 * std::max(1.0, std::abs(a.tau[k])));
        CHECK(std::abs(a.tau2[k] - b.tau2[k]) <= 1e-12 * std::max(1.0, std::abs(a.tau2[k])));
      }
    }
  }
}

TEST_CASE("harmonic maps are biharmonic") {
  const auto S2 = unit_sphere_beta_gamma();
  const std::vector<std::string> c{"beta", "gamma"};
  const SmoothMap equator("totally geodesic S2 in S3", S2, corpus::round_three_sphere(),
                          {parse("pi/2", c), parse("beta", c), parse("gamma", c)});
  for (const auto& p : sample_points(*S2, 30, 8)) {
    const MapPointData d = equator.evaluate(p);
    CHECK(target_norm(d.target_metric, d.tau) <= 1e-10);
    CHECK(target_norm(d.target_metric, d.tau2) <= 1e-7);
  }
}

TEST_CASE("composition of the small sphere inclusion with an isometry") {
  const std::vector<std::string> c{"beta", "gamma"};
  const auto src = corpus::small_sphere();
  const SmoothMap rotation("rotation", src, src, {parse("beta", c), parse("gamma + 0.3", c)});
  const SmoothMap composed("i o rotation", src, corpus::round_three_sphere(),
                           {parse("pi/4", c), parse("beta", c), parse("gamma + 0.3", c)});
  for (const auto& p : sample_points(*src, 30, 9)) {
    const MapPointData r = rotation.evaluate(p);
    CHECK(r.energy_density == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(target_norm(r.target_metric, r.tau) <= 1e-10);
    const MapPointData d = composed.evaluate(p);
    CHECK(target_norm(d.target_metric, d.tau) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(target_norm(d.target_metric, d.tau2) <= 1e-8);
  }
}

TEST_CASE("map construction and evaluation errors") {
  const auto S = corpus::round_sphere(1.0);
  const std::vector<std::string> c{"theta", "phi"};
  CHECK_THROWS_AS(SmoothMap("short", S, corpus::round_three_sphere(), {parse("theta", c)}), DimensionMismatch);
  CHECK_THROWS_AS(SmoothMap("foreign", S, S, {Expr::variable("x"), Expr::variable("phi")}), std::invalid_argument);
  const SmoothMap outside("outside", S, corpus::round_three_sphere(),
                          {parse("4", c), parse("theta", c), parse("phi", c)});
  CHECK_THROWS_AS((void)outside.evaluate(std::vector<double>{1.0, 1.0}), DomainViolation);
}
