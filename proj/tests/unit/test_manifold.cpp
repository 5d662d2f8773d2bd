#include <doctest.h>

#include <cmath>
#include <numbers>

#include "bitensor/corpus.hpp"
#include "bitensor/errors.hpp"
#include "bitensor/parse.hpp"
#include "bitensor/sampling.hpp"

using namespace bitensor;

namespace {

constexpr double kPi = std::numbers::pi;

// Christoffel symbols from central differences of a metric callback.
template <class MetricFn>
RealTensor fd_christoffel(MetricFn g_at, std::vector<double> p, double h = 1e-5) {
  const std::size_t m = p.size();
  RealTensor dg({m, m, m});
  for (std::size_t k = 0; k < m; ++k) {
    auto plus = p, minus = p;
    plus[k] += h;
    minus[k] -= h;
    const RealTensor gp = g_at(plus), gm = g_at(minus);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) dg(k, i, j) = (gp(i, j) - gm(i, j)) / (2 * h);
    }
  }
  const RealTensor g = g_at(p);
  RealTensor ginv({m, m});
  REQUIRE(m == 2);
  const double det = g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0);
  ginv(0, 0) = g(1, 1) / det;
  ginv(1, 1) = g(0, 0) / det;
  ginv(0, 1) = ginv(1, 0) = -g(0, 1) / det;
  RealTensor gamma({m, m, m});
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        double s = 0.0;
        for (std::size_t l = 0; l < m; ++l) s += ginv(k, l) * (dg(i, j, l) + dg(j, i, l) - dg(l, i, j));
        gamma(k, i, j) = 0.5 * s;
      }
    }
  }
  return gamma;
}

void check_pointwise_invariants(const ChartedManifold& M, const std::vector<double>& p) {
  const PointEval pe = M.point_eval(p);
  const std::size_t m = M.dimension();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < m; ++k) s += pe.g_inv(i, k) * pe.g(k, j);
      CHECK(std::abs(s - (i == j ? 1.0 : 0.0)) <= 1e-12);
      CHECK(std::abs(pe.ricci(i, j) - pe.ricci(j, i)) <= 1e-10);
      for (std::size_t k = 0; k < m; ++k) CHECK(pe.christoffel(k, i, j) == pe.christoffel(k, j, i));
    }
  }
  for (std::size_t l = 0; l < m; ++l) {
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t k = 0; k < m; ++k) {
          const double bianchi = pe.riemann(l, i, j, k) + pe.riemann(l, j, k, i) + pe.riemann(l, k, i, j);
          CHECK(std::abs(bianchi) <= 1e-9);
        }
      }
    }
  }
}

ExprTensor einstein_tensor(const ChartedManifold& M) {
  const std::size_t m = M.dimension();
  ExprTensor t({m, m});
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) t(i, j) = M.ricci()(i, j) - Expr(0.5) * M.scalar_curvature() * M.metric()(i, j);
  }
  return t;
}

double max_abs(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s = std::max(s, std::abs(x));
  return s;
}

}  // namespace

TEST_CASE("unit sphere Christoffel symbols and scalar curvature at (pi/3, 0)") {
  const auto S = corpus::round_sphere(1.0);
  const std::vector<double> p{kPi / 3, 0.0};
  const PointEval pe = S->point_eval(p);
  CHECK(pe.christoffel(0, 1, 1) == doctest::Approx(-std::sqrt(3.0) / 4).epsilon(1e-14));
  CHECK(pe.christoffel(1, 0, 1) == doctest::Approx(1 / std::sqrt(3.0)).epsilon(1e-14));
  CHECK(pe.scalar == doctest::Approx(2.0).epsilon(1e-12));

  auto g_at = [](const std::vector<double>& q) {
    RealTensor g({2, 2});
    g(0, 0) = 1.0;
    g(1, 1) = std::sin(q[0]) * std::sin(q[0]);
    return g;
  };
  const RealTensor oracle = fd_christoffel(g_at, p);
  for (std::size_t k = 0; k < oracle.size(); ++k) CHECK(std::abs(oracle.data()[k] - pe.christoffel.data()[k]) <= 1e-8);
}

TEST_CASE("flat torus has vanishing connection and curvature") {
  const auto T = corpus::flat_torus();
  CHECK(T->is_flat());
  const PointEval pe = T->point_eval(std::vector<double>{1.0, 2.0});
  CHECK(max_abs(pe.christoffel.data()) == 0.0);
  CHECK(max_abs(pe.riemann.data()) == 0.0);
  CHECK(pe.scalar == 0.0);
}

TEST_CASE("sphere of radius R has r = 2/R^2 and K = 1/R^2") {
  for (double R : {0.5, 1.0, 2.0, 3.0}) {
    const auto S = corpus::round_sphere(R);
    for (const auto& p : sample_points(*S, 10, 7)) {
      const PointEval pe = S->point_eval(p);
      CHECK(pe.scalar == doctest::Approx(2 / (R * R)).epsilon(1e-10));
      // K = <R(d1, d2) d2, d1> / det g
      const double r1212 = pe.g(0, 0) * pe.riemann(0, 0, 1, 1);
      CHECK(r1212 / (pe.g(0, 0) * pe.g(1, 1)) == doctest::Approx(1 / (R * R)).epsilon(1e-10));
    }
  }
}

TEST_CASE("homothetic metric keeps Christoffel symbols and scales r by 1/t") {
  const auto M = corpus::perturbed_metric(11);
  for (double t : {2.0, 5.0}) {
    const auto Mt = M->with_scaled_metric(Expr(t), "scaled");
    for (const auto& p : sample_points(*M, 8, 3)) {
      const PointEval a = M->point_eval(p), b = Mt->point_eval(p);
      for (std::size_t k = 0; k < a.christoffel.size(); ++k) {
        CHECK(std::abs(a.christoffel.data()[k] - b.christoffel.data()[k]) <= 1e-12);
      }
      CHECK(b.scalar == doctest::Approx(a.scalar / t).epsilon(1e-10));
    }
  }
}

TEST_CASE("pointwise invariants hold on corpus manifolds") {
  std::vector<ManifoldPtr> manifolds{corpus::round_sphere(1.0), corpus::round_sphere(2.0), corpus::flat_torus(),
                                     corpus::small_sphere(),    corpus::round_three_sphere(), corpus::warped_product(0.7),
                                     corpus::perturbed_metric(1), corpus::perturbed_metric(2)};
  for (const auto& M : manifolds) {
    CAPTURE(M->name());
    M->validate_positive_definite();
    for (const auto& p : sample_points(*M, 20, 5)) check_pointwise_invariants(*M, p);
  }
}

TEST_CASE("contracted Bianchi identity") {
  std::vector<ManifoldPtr> manifolds{corpus::round_sphere(1.0), corpus::flat_torus(), corpus::round_three_sphere(),
                                     corpus::perturbed_metric(3), corpus::perturbed_metric(4)};
  for (const auto& M : manifolds) {
    CAPTURE(M->name());
    const SymTensorField field(*M, einstein_tensor(*M));
    for (const auto& p : sample_points(*M, 25, 9)) CHECK(max_abs(divergence(*M, field, p)) <= 1e-8);
  }
}

TEST_CASE("divergence of the metric and of f g") {
  const auto S = corpus::round_sphere(1.0);
  const SymTensorField g_field(*S, S->metric());
  CHECK(max_abs(divergence(*S, g_field, std::vector<double>{0.7, 1.1})) <= 1e-14);

  const auto R2 = corpus::flat("R2", {"x", "y"}, std::vector<CoordinateRange>(2, {-2.0, 2.0}));
  ExprTensor fg({2, 2});
  const Expr x = Expr::variable("x");
  fg(0, 0) = x;
  fg(1, 1) = x;
  const auto div = divergence(*R2, SymTensorField(*R2, fg), std::vector<double>{0.3, -0.4});
  CHECK(div[0] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(div[1] == 0.0);
}

TEST_CASE("Lie derivative of the metric") {
  const auto R2 = corpus::flat("R2", {"x", "y"}, std::vector<CoordinateRange>(2, {-2.0, 2.0}));
  const std::vector<std::string> vars{"x", "y"};
  const std::vector<double> p{0.4, -1.3};

  const std::vector<Expr> rotation{parse("-y", vars), parse("x", vars)};
  CHECK(max_abs(lie_derivative_metric(*R2, rotation, p).data()) == 0.0);

  const std::vector<Expr> radial{parse("x", vars), parse("y", vars)};
  const RealTensor L = lie_derivative_metric(*R2, radial, p);
  CHECK(L(0, 0) == 2.0);
  CHECK(L(1, 1) == 2.0);
  CHECK(L(0, 1) == 0.0);

  const auto line = corpus::line("t", -1.0, 1.0);
  const std::vector<Expr> translation{Expr(0.7)};
  CHECK(max_abs(lie_derivative_metric(*line, translation, std::vector<double>{0.2}).data()) == 0.0);

  // rotation about the axis is an isometry of the round sphere
  const auto S = corpus::round_sphere(1.5);
  const std::vector<Expr> axial{Expr(0.0), Expr(1.0)};
  CHECK(max_abs(lie_derivative_metric(*S, axial, std::vector<double>{0.9, 2.0}).data()) <= 1e-15);
}

TEST_CASE("manifold error reporting") {
  const auto S = corpus::round_sphere(1.0);
  CHECK_THROWS_AS((void)S->point_eval(std::vector<double>{0.0, 1.0}), DegenerateMetric);
  CHECK_THROWS_AS((void)S->point_eval(std::vector<double>{4.0, 1.0}), DomainViolation);
  CHECK_THROWS_AS((void)S->point_eval(std::vector<double>{1.0}), DimensionMismatch);
  // periodic coordinates accept any value
  CHECK_NOTHROW((void)S->point_eval(std::vector<double>{1.0, 17.0}));

  const std::vector<std::string> vars{"x", "y"};
  const ChartedManifold indefinite("indefinite", vars, std::vector<CoordinateRange>(2, {-1.0, 1.0}),
                                   {parse("1", vars), parse("0", vars), parse("x", vars)});
  CHECK_THROWS_AS(indefinite.validate_positive_definite(), NotPositiveDefinite);
  try {
    indefinite.validate_positive_definite();
  } catch (const NotPositiveDefinite& e) {
    CHECK(std::string(e.what()).find("indefinite") != std::string::npos);
  }
  CHECK_THROWS_AS(ChartedManifold("bad", vars, std::vector<CoordinateRange>(2, {-1.0, 1.0}), {Expr(1.0)}),
                  DimensionMismatch);
}

TEST_CASE("sample points are deterministic and interior") {
  const auto S = corpus::round_sphere(1.0);
  const auto a = sample_points(*S, 50, 42), b = sample_points(*S, 50, 42), c = sample_points(*S, 50, 43);
  CHECK(a == b);
  CHECK(a != c);
  for (const auto& p : a) {
    CHECK(p[0] >= kBoundaryMargin);
    CHECK(p[0] <= kPi - kBoundaryMargin);
    CHECK(p[1] >= 0.0);
    CHECK(p[1] < 2 * kPi);
  }
}
