#include <doctest.h>

#include <cmath>

#include "bitensor/corpus.hpp"
#include "bitensor/errors.hpp"
#include "bitensor/parse.hpp"
#include "bitensor/sampling.hpp"

using namespace bitensor;

namespace {

double max_abs(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s = std::max(s, std::abs(x));
  return s;
}

double max_diff(const RealTensor& a, const RealTensor& b, double scale = 1.0) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s = std::max(s, std::abs(a.data()[k] - scale * b.data()[k]));
  return s;
}

}  // namespace

TEST_CASE("stress-energy tensor S") {
  SUBCASE("conformal surface map has S = 0") {
    const SmoothMap sq = corpus::holomorphic_square();
    const StressEnergy st(sq);
    for (const auto& p : sample_points(sq.source(), 30, 1)) CHECK(max_abs(st.evaluate(p).S.data()) <= 1e-10);
  }
  SUBCASE("identity on flat R3 has S = g/2") {
    const auto R3 = corpus::flat("R3", {"x", "y", "z"}, std::vector<CoordinateRange>(3, {-1.0, 1.0}));
    const StressTensors t = stress_S(corpus::identity(R3), std::vector<double>{0.1, 0.2, 0.3});
    const PointEval pe = R3->point_eval(std::vector<double>{0.1, 0.2, 0.3});
    const LambdaFit fit = fit_lambda(pe, t.S);
    CHECK(fit.lambda == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(fit.residual <= 1e-15);
  }
  SUBCASE("constant map") {
    const auto S2 = corpus::round_sphere(1.0);
    const StressTensors t = stress_S(corpus::constant(S2, corpus::round_three_sphere(), {1, 1, 1}),
                                     std::vector<double>{0.4, 0.4});
    CHECK(max_abs(t.S.data()) == 0.0);
  }
}

TEST_CASE("bistress tensor S2") {
  SUBCASE("cubic curve has S2 = 0 while tau does not vanish") {
    const StressEnergy st(corpus::cubic_curve());
    for (double t = 0.5; t <= 2.0; t += 0.125) {
      const StressTensors s = st.evaluate(std::vector<double>{t});
      CHECK(std::abs(s.S2(0, 0)) <= 1e-9);
    }
    CHECK(corpus::cubic_curve().evaluate(std::vector<double>{1.0}).tau[0] == doctest::Approx(6.0).epsilon(1e-15));
  }
  SUBCASE("sphere family S2 = m(4-m)/(2R^2) g") {
    for (std::size_t m : {2u, 3u, 4u}) {
      for (double R : {1.0, 2.0}) {
        const Immersion imm = corpus::sphere(m, R);
        const StressEnergy st(imm.inclusion());
        const double lambda = static_cast<double>(m * (4 - static_cast<int>(m))) / (2 * R * R);
        for (const auto& p : sample_points(imm.source(), 10, 2)) {
          CAPTURE(m);
          CAPTURE(R);
          const PointEval pe = imm.source().point_eval(p);
          const StressTensors s = st.evaluate(p);
          const LambdaFit fit = fit_lambda(pe, s.S2);
          CHECK(std::abs(fit.lambda - lambda) <= 1e-9);
          CHECK(fit.residual <= 1e-10);
          if (m == 2) {
            const MapPointData d = imm.inclusion().evaluate(p);
            const double half_tau_sq = 0.5 * target_inner(d.target_metric, d.tau, d.tau);
            CHECK(max_diff(s.S2, pe.g, half_tau_sq) <= 1e-9);
          }
        }
      }
    }
  }
  SUBCASE("harmonic maps have S2 = 0") {
    const auto S = corpus::round_sphere(1.3);
    const StressEnergy st(corpus::identity(S));
    for (const auto& p : sample_points(*S, 10, 3)) CHECK(max_abs(st.evaluate(p).S2.data()) <= 1e-12);
  }
}

TEST_CASE("divergence identities") {
  const auto check = [](const SmoothMap& phi, std::size_t count, double tol) {
    CAPTURE(phi.name());
    const auto pts = sample_points(phi.source(), count, 17);
    const DivIdentityResiduals r = check_div_identities(phi, pts);
    CHECK(r.points == count);
    CHECK(r.stress <= tol);
    CHECK(r.bistress <= 1e-8);
  };
  for (std::uint64_t seed = 1; seed <= 10; ++seed) check(corpus::random_polynomial_map(seed), 20, 1e-8);
  check(corpus::small_sphere_inclusion(), 30, 1e-8);
  check(corpus::warped_projection(0.7), 30, 1e-8);
  check(corpus::cubic_curve(), 10, 1e-8);
  check(corpus::circle(2.0), 10, 1e-8);
  check(corpus::holomorphic_square(), 20, 1e-8);
  check(corpus::identity(corpus::round_sphere(1.0)), 20, 1e-12);

  // with τ₂ = 0 the small sphere inclusion has Div S₂ = 0
  const StressEnergy st(corpus::small_sphere_inclusion());
  for (const auto& p : sample_points(st.map().source(), 20, 4)) CHECK(max_abs(st.evaluate(p).div_S2) <= 1e-8);
}

TEST_CASE("homothety law") {
  const Immersion s2 = corpus::sphere(2, 1.5);
  const auto pts = sample_points(s2.source(), 10, 5);
  for (double t : {0.5, 2.0, 4.0}) {
    for (const auto& pair : homothety_transform(s2.inclusion(), t, pts)) {
      CHECK(max_diff(pair.transformed, pair.original, 1 / t) <= 1e-10);
    }
  }
  const SmoothMap curve = corpus::cubic_curve();
  const TransformPair c = homothety_transform(curve, 9.0, std::vector<double>{1.2});
  CHECK(std::abs(c.original(0, 0)) <= 1e-9);
  CHECK(std::abs(c.transformed(0, 0)) <= 1e-9);
  CHECK_THROWS_AS((void)homothety_transform(curve, 0.0, std::vector<double>{1.0}), std::invalid_argument);
}

TEST_CASE("conformal surface law") {
  const Immersion s2 = corpus::sphere(2, 1.0);
  const std::vector<std::string> c{"theta", "phi"};
  const auto pts = sample_points(s2.source(), 20, 6);
  for (const auto& pair : conformal_surface_transform(s2.inclusion(), parse("0.3*cos(theta)", c), pts)) {
    CHECK(pair.hypothesis_holds);
    CHECK(max_diff(pair.transformed, pair.original, pair.factor) <= 1e-8);
  }
  for (const auto& pair : conformal_surface_transform(s2.inclusion(), Expr(0.0), pts)) {
    CHECK(pair.factor == 1.0);
    CHECK(max_diff(pair.transformed, pair.original) == 0.0);
  }
  const double cst = 0.25;
  const auto conf = conformal_surface_transform(s2.inclusion(), Expr(cst), pts);
  const auto homo = homothety_transform(s2.inclusion(), std::exp(2 * cst), pts);
  for (std::size_t k = 0; k < pts.size(); ++k) CHECK(max_diff(conf[k].transformed, homo[k].transformed) <= 1e-12);

  // a generic map violates the orthogonality hypothesis
  const auto generic = conformal_surface_transform(corpus::random_polynomial_map(3), Expr(0.1), std::vector<double>{0.3, -0.2});
  CHECK_FALSE(generic.hypothesis_holds);
  CHECK(generic.hypothesis_residual > kOrthogonalityTolerance);
  CHECK_THROWS_AS((void)conformal_surface_transform(corpus::cubic_curve(), Expr(0.1), std::vector<double>{1.0}),
                  DimensionMismatch);
}
