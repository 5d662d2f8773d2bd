#include <doctest.h>

#include <cmath>
#include <random>

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

double max_diff(const RealTensor& a, const RealTensor& b, double scale = 1.0) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s = std::max(s, std::abs(a.data()[k] - scale * b.data()[k]));
  return s;
}

std::vector<Expr> parse_field(std::initializer_list<std::string_view> src, const Immersion& imm) {
  std::vector<Expr> out;
  for (auto s : src) out.push_back(parse(s, imm.source().coords()));
  return out;
}

// Random smooth ambient field built from low-order trigonometric terms.
std::vector<Expr> random_field(const Immersion& imm, std::mt19937_64& rng) {
  const Expr u = Expr::variable(imm.source().coords()[0]);
  const Expr v = Expr::variable(imm.source().coords()[1]);
  const std::vector<Expr> basis{Expr(1.0), sin(u), cos(u), sin(v), cos(v), sin(u + v)};
  std::vector<Expr> field(imm.ambient_dimension());
  for (Expr& f : field) {
    for (const Expr& b : basis) f += Expr(2.0 * unit_interval(rng) - 1.0) * b;
  }
  return field;
}

}  // namespace

TEST_CASE("round sphere fundamental forms and Gauss map") {
  for (double R : {0.5, 1.0, 2.0}) {
    const Immersion s = corpus::sphere(2, R);
    for (const auto& p : sample_points(s.source(), 15, 1)) {
      const SubmanifoldPointData d = s.evaluate(p);
      CHECK(std::sqrt(d.H_norm_sq) == doctest::Approx(1 / R).epsilon(1e-12));
      CHECK(max_abs(d.pseudo_umbilic_residual.data()) <= 1e-10);
      CHECK(max_abs(d.S_traceless.data()) <= 1e-10);
      CHECK(max_diff(d.gauss_pullback, d.g, 1 / (R * R)) <= 1e-10);
      CHECK(d.gauss_energy == doctest::Approx(1 / (R * R)).epsilon(1e-10));
      CHECK(max_abs(d.S_G.data()) <= 1e-10);
      CHECK(ruh_vilms_residual(d) <= 1e-9);
      CHECK(norm(d.willmore_gradient) <= 1e-10);
    }
  }
}

TEST_CASE("Clifford torus fundamental forms and Gauss map") {
  const Immersion c = corpus::clifford_torus();
  for (const auto& p : sample_points(c.source(), 15, 2)) {
    const SubmanifoldPointData d = c.evaluate(p);
    CHECK(d.g(0, 0) == 0.5);
    CHECK(d.H_norm_sq == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(max_diff(d.HdotB, d.g) <= 1e-12);
    CHECK(max_abs(d.pseudo_umbilic_residual.data()) <= 1e-10);
    CHECK(max_diff(d.gauss_pullback, d.g, 2.0) <= 1e-10);
    CHECK(d.gauss_energy == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(max_abs(d.S_G.data()) <= 1e-10);
    CHECK(ruh_vilms_residual(d) <= 1e-9);
    CHECK(norm(d.willmore_gradient) <= 1e-10);
    // B_uu = −(x − ν)/2 with ν = (cos u, sin u, −cos v, −sin v)/√2
    const double s2 = std::sqrt(2.0);
    CHECK(d.B(0, 0, 0) == doctest::Approx(-std::cos(p[0]) / s2).epsilon(1e-12));
    CHECK(std::abs(d.B(2, 0, 0)) <= 1e-14);
    CHECK(max_abs(std::vector<double>{d.B(0, 0, 1), d.B(1, 0, 1), d.B(2, 0, 1), d.B(3, 0, 1)}) <= 1e-14);
  }
}

TEST_CASE("cylinder is a negative witness") {
  const Immersion cyl = corpus::cylinder();
  for (const auto& p : sample_points(cyl.source(), 15, 3)) {
    const SubmanifoldPointData d = cyl.evaluate(p);
    CHECK(std::sqrt(d.H_norm_sq) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(d.scalar == 0.0);
    CHECK(d.gauss_energy == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(tensor_norm(d.g_inv, d.pseudo_umbilic_residual) > 1e-3);
    CHECK(tensor_norm(d.g_inv, d.S_G) > 1e-3);
    CHECK(ruh_vilms_residual(d) <= 1e-9);
    CHECK(norm(d.willmore_gradient) > 1e-2);
  }
}

TEST_CASE("paraboloid") {
  const Immersion par = corpus::paraboloid();
  const SubmanifoldPointData o = par.evaluate(std::vector<double>{0.0, 0.0});
  CHECK(o.H[0] == 0.0);
  CHECK(o.H[1] == 0.0);
  CHECK(o.H[2] == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(max_abs(o.pseudo_umbilic_residual.data()) <= 1e-12);

  const SubmanifoldPointData q = par.evaluate(std::vector<double>{0.3, 0.2});
  CHECK(ruh_vilms_residual(q) > 1e-3);
  CHECK(tensor_norm(q.g_inv, q.pseudo_umbilic_residual) > 1e-3);
}

TEST_CASE("pointwise invariants on corpus immersions") {
  std::vector<Immersion> corpus_list{corpus::sphere(2, 1.0), corpus::sphere(3, 1.5), corpus::sphere(4, 1.0),
                                     corpus::clifford_torus(), corpus::cylinder(), corpus::torus_of_revolution(),
                                     corpus::paraboloid(),     corpus::random_graph_surface(5)};
  for (const auto& imm : corpus_list) {
    CAPTURE(imm.name());
    const std::size_t m = imm.dimension(), n = imm.ambient_dimension();
    for (const auto& p : sample_points(imm.source(), 10, 4)) {
      const SubmanifoldPointData d = imm.evaluate(p);
      const MapPointData md = imm.inclusion().evaluate(p);
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
          for (std::size_t k = 0; k < m; ++k) {
            double s = 0.0;
            for (std::size_t a = 0; a < n; ++a) s += d.B(a, i, j) * d.jacobian(a, k);
            CHECK(std::abs(s) <= 1e-10);
          }
        }
      }
      for (std::size_t a = 0; a < n; ++a) {
        double tr = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
          for (std::size_t j = 0; j < m; ++j) tr += d.g_inv(i, j) * d.S_traceless(a, i, j);
        }
        CHECK(std::abs(tr) <= 1e-10);
        CHECK(std::abs(md.tau[a] - static_cast<double>(m) * d.H[a]) <= 1e-10);
      }
      const double md_ = static_cast<double>(m);
      CHECK(d.gauss_energy == doctest::Approx(0.5 * md_ * md_ * d.H_norm_sq - 0.5 * d.scalar).epsilon(1e-10));
      if (m == 2) CHECK(d.gauss_energy == doctest::Approx(2 * d.H_norm_sq - 0.5 * d.scalar).epsilon(1e-10));
    }
  }
}

TEST_CASE("Pluecker oracle reproduces the Gauss formula") {
  std::vector<Immersion> corpus_list{corpus::sphere(2, 1.0), corpus::sphere(2, 2.0), corpus::clifford_torus(),
                                     corpus::cylinder(),     corpus::torus_of_revolution(), corpus::random_graph_surface(1),
                                     corpus::random_graph_surface(2), corpus::sphere(3, 1.0)};
  for (const auto& imm : corpus_list) {
    CAPTURE(imm.name());
    const PlueckerOracle oracle(imm);
    const PlueckerOracle rotated(imm, 0.7);
    for (const auto& p : sample_points(imm.source(), 20, 5)) {
      const SubmanifoldPointData d = imm.evaluate(p);
      const RealTensor w = oracle.pullback(p);
      CHECK(max_diff(w, d.gauss_pullback) <= 1e-7);
      CHECK(max_diff(rotated.pullback(p), w) <= 1e-9);
    }
  }
  CHECK(PlueckerOracle(corpus::clifford_torus()).wedge_dimension() == 6);
  const Immersion s = corpus::sphere(2, 1.0);
  CHECK(max_diff(gauss_pluecker_oracle(s, std::vector<double>{1.0, 2.0}), s.evaluate(std::vector<double>{1.0, 2.0}).g) <=
        1e-8);
}

TEST_CASE("surface equivalence chain") {
  for (const auto& imm : {corpus::sphere(2, 1.0), corpus::sphere(2, 3.0), corpus::clifford_torus()}) {
    CAPTURE(imm.name());
    const StressEnergy st(imm.inclusion());
    for (const auto& p : sample_points(imm.source(), 20, 6)) {
      const EquivalenceResiduals r = equivalence_residuals(imm, st, p);
      CHECK(r.gauss_stress <= 1e-8);
      CHECK(r.gauss_conformality <= 1e-8);
      CHECK(r.pseudo_umbilicity <= 1e-8);
      CHECK(r.bistress_half_tau <= 1e-8);
    }
  }
  const Immersion cyl = corpus::cylinder();
  const StressEnergy st(cyl.inclusion());
  for (const auto& p : sample_points(cyl.source(), 20, 6)) {
    const EquivalenceResiduals r = equivalence_residuals(cyl, st, p);
    CHECK(r.gauss_stress >= 1e-3);
    CHECK(r.gauss_conformality >= 1e-3);
    CHECK(r.pseudo_umbilicity >= 1e-3);
    CHECK(r.bistress_half_tau >= 1e-3);
  }
}

TEST_CASE("divergence relation between S^G and S2") {
  std::vector<Immersion> corpus_list{corpus::sphere(2, 1.0), corpus::sphere(3, 2.0), corpus::sphere(4, 1.0),
                                     corpus::clifford_torus(), corpus::cylinder(), corpus::torus_of_revolution(),
                                     corpus::paraboloid(),     corpus::random_graph_surface(3)};
  for (const auto& imm : corpus_list) {
    CAPTURE(imm.name());
    const StressEnergy st(imm.inclusion());
    for (const auto& p : sample_points(imm.source(), 15, 7)) CHECK(gauss_divergence_relation(imm, st, p) <= 1e-7);
  }
}

TEST_CASE("constant mean curvature gives divergence-free S2 and S^G") {
  for (const auto& imm : {corpus::sphere(2, 1.0), corpus::cylinder(), corpus::clifford_torus()}) {
    CAPTURE(imm.name());
    const StressEnergy st(imm.inclusion());
    for (const auto& p : sample_points(imm.source(), 15, 8)) {
      std::vector<double> div_sg, d_tau_sq;
      imm.gauss_divergence(p, div_sg, d_tau_sq);
      CHECK(max_abs(div_sg) <= 1e-8);
      const StressTensors s = st.evaluate(p);
      CHECK(max_abs(s.div_S2) <= 1e-8);
      // τ₂ of a Riemannian immersion is then normal
      CHECK(max_abs(s.tau2_pairing) <= 1e-8);
    }
  }
}

TEST_CASE("first variation of the metric") {
  SUBCASE("sphere with the inward unit normal") {
    const double R = 1.5;
    const Immersion s = corpus::sphere(2, R);
    const auto V = parse_field({"-sin(theta)*cos(phi)", "-sin(theta)*sin(phi)", "-cos(theta)"}, s);
    for (const auto& p : sample_points(s.source(), 10, 9)) {
      const OmegaComparison c = variation_omega_check(s, V, p);
      const PointEval pe = s.source().point_eval(p);
      CHECK_FALSE(c.projected);
      CHECK(max_diff(c.formula_omega, pe.g, -2 / R) <= 1e-6);
      CHECK(max_diff(c.fd_omega, pe.g, -2 / R) <= 1e-6);
    }
  }
  SUBCASE("zero field") {
    const Immersion s = corpus::sphere(2, 1.0);
    const std::vector<Expr> zero(3, Expr(0.0));
    const OmegaComparison c = variation_omega_check(s, zero, std::vector<double>{1.0, 1.0});
    CHECK(max_abs(c.fd_omega.data()) == 0.0);
    CHECK(max_abs(c.formula_omega.data()) == 0.0);
  }
  SUBCASE("Clifford torus and random normal fields") {
    const Immersion c = corpus::clifford_torus();
    const auto nu = parse_field({"cos(u)/sqrt(2)", "sin(u)/sqrt(2)", "-cos(v)/sqrt(2)", "-sin(v)/sqrt(2)"}, c);
    std::mt19937_64 rng(10);
    for (const auto& p : sample_points(c.source(), 10, 10)) {
      const OmegaComparison a = variation_omega_check(c, nu, p);
      CHECK(max_diff(a.fd_omega, a.formula_omega) <= 1e-6);
      const OmegaComparison b = variation_omega_check(c, random_field(c, rng), p);
      CHECK(b.projected);
      CHECK(max_diff(b.fd_omega, b.formula_omega) <= 1e-6);
    }
  }
  SUBCASE("tangential fields are projected away") {
    const Immersion s = corpus::sphere(2, 1.0);
    const auto tangent = parse_field({"cos(theta)*cos(phi)", "cos(theta)*sin(phi)", "-sin(theta)"}, s);
    const OmegaComparison c = variation_omega_check(s, tangent, std::vector<double>{1.0, 0.5});
    CHECK(c.projected);
    CHECK(c.tangential_part == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(max_abs(c.formula_omega.data()) <= 1e-12);
    CHECK(max_abs(c.fd_omega.data()) <= 1e-10);
  }
}

TEST_CASE("Willmore algebra") {
  SUBCASE("random normal fields on the Clifford torus") {
    const Immersion c = corpus::clifford_torus();
    std::mt19937_64 rng(20);
    const auto pts = sample_points(c.source(), 20, 11);
    for (int k = 0; k < 20; ++k) {
      const auto V = c.normal_projection(random_field(c, rng));
      const WeinerResiduals r = weiner_algebra_check(c, V, pts[static_cast<std::size_t>(k)]);
      CHECK(r.variation <= 1e-9);
      CHECK(r.traceless <= 1e-9);
    }
  }
  SUBCASE("sphere: both sides vanish") {
    const Immersion s = corpus::sphere(2, 1.0);
    const auto V = parse_field({"sin(theta)*cos(phi)", "sin(theta)*sin(phi)", "cos(theta)"}, s);
    const WeinerResiduals r = weiner_algebra_check(s, V, std::vector<double>{0.8, 0.3});
    CHECK(std::abs(r.lhs) <= 1e-12);
    CHECK(std::abs(r.rhs) <= 1e-12);
  }
  SUBCASE("cylinder: identity holds with nonzero sides") {
    const Immersion cyl = corpus::cylinder();
    const auto nu = parse_field({"cos(u)", "sin(u)", "0"}, cyl);
    for (const auto& p : sample_points(cyl.source(), 10, 12)) {
      const WeinerResiduals r = weiner_algebra_check(cyl, nu, p);
      CHECK(r.variation <= 1e-9);
      CHECK(r.traceless <= 1e-9);
      CHECK(std::abs(r.lhs) > 1e-3);
      CHECK(std::abs(r.rhs) > 1e-3);
    }
  }
}

TEST_CASE("immersion errors") {
  const std::vector<std::string> c{"u", "v"};
  auto wrong = corpus::flat("wrong", c, std::vector<CoordinateRange>(2, {-1.0, 1.0}));
  CHECK_THROWS_AS(Immersion("wrong metric", wrong, {parse("2*u", c), parse("v", c), parse("0", c)}), ImmersionFailure);
  CHECK_THROWS_AS(Immersion("too small", wrong, {parse("u", c)}), DimensionMismatch);
  CHECK_THROWS_AS((void)willmore_gradient(corpus::sphere(3, 1.0), std::vector<double>{1.0, 1.0, 1.0}),
                  DimensionMismatch);
}
