#include "bitensor/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "bitensor/errors.hpp"

namespace bitensor {

namespace {

double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

}  // namespace

std::size_t Grid::node_count() const noexcept {
  std::size_t n = axes.empty() ? 0 : 1;
  for (const auto& a : axes) n *= a.nodes.size();
  return n;
}

QuadratureAxis gauss_legendre(std::size_t n, double lo, double hi) {
  if (n == 0) throw std::invalid_argument("gauss_legendre: n must be positive");
  QuadratureAxis axis;
  axis.rule = QuadratureRule::GaussLegendre;
  axis.nodes.resize(n);
  axis.weights.resize(n);
  const double nd = static_cast<double>(n);
  const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (nd + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const double kd = static_cast<double>(k);
        const double p2 = ((2.0 * kd - 1.0) * x * p1 - (kd - 1.0) * p0) / kd;
        p0 = p1;
        p1 = p2;
      }
      dp = nd * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    axis.nodes[i] = mid - half * x;
    axis.nodes[n - 1 - i] = mid + half * x;
    axis.weights[i] = half * w;
    axis.weights[n - 1 - i] = half * w;
  }
  return axis;
}

QuadratureAxis periodic_trapezoid(std::size_t n, double lo, double hi) {
  if (n == 0) throw std::invalid_argument("periodic_trapezoid: n must be positive");
  QuadratureAxis axis;
  axis.rule = QuadratureRule::PeriodicTrapezoid;
  const double h = (hi - lo) / static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k) {
    axis.nodes.push_back(lo + h * static_cast<double>(k));
    axis.weights.push_back(h);
  }
  return axis;
}

Grid make_grid(const ChartedManifold& manifold, std::span<const std::size_t> sizes) {
  const std::size_t m = manifold.dimension();
  if (m > 4) throw DimensionMismatch("quadrature supports at most 4 coordinates");
  if (sizes.size() > 1 && sizes.size() != m) throw DimensionMismatch("grid sizes must match the dimension");
  Grid grid;
  for (std::size_t c = 0; c < m; ++c) {
    const CoordinateRange& r = manifold.domain()[c];
    if (!std::isfinite(r.lo) || !std::isfinite(r.hi)) {
      throw std::invalid_argument("cannot integrate over the unbounded coordinate '" + manifold.coords()[c] + "'");
    }
    const bool periodic = r.periodic();
    std::size_t n = periodic ? kDefaultPeriodicNodes : kDefaultGaussNodes;
    if (sizes.size() == 1) n = sizes[0];
    if (sizes.size() == m) n = sizes[c];
    switch (r.kind) {
      case CoordinateKind::Periodic:
        grid.axes.push_back(periodic_trapezoid(n, r.lo, r.hi));
        break;
      case CoordinateKind::Bounded:
        grid.axes.push_back(gauss_legendre(n, r.lo, r.hi));
        break;
      case CoordinateKind::Polar: {
        // θ = acos(t), dθ = dt / sin θ
        QuadratureAxis axis = gauss_legendre(n, std::cos(r.hi), std::cos(r.lo));
        for (std::size_t k = 0; k < n; ++k) {
          const double theta = std::acos(axis.nodes[k]);
          axis.weights[k] /= std::sin(theta);
          axis.nodes[k] = theta;
        }
        grid.axes.push_back(std::move(axis));
        break;
      }
    }
  }
  return grid;
}

double integrate_on(const ChartedManifold& manifold, const Grid& grid, const ScalarField& f) {
  const std::size_t m = grid.axes.size();
  std::vector<double> terms;
  terms.reserve(grid.node_count());
  std::vector<std::size_t> idx(m, 0);
  std::vector<double> p(m);
  for (;;) {
    double w = 1.0;
    for (std::size_t c = 0; c < m; ++c) {
      p[c] = grid.axes[c].nodes[idx[c]];
      w *= grid.axes[c].weights[idx[c]];
    }
    const double v = f(p);
    if (!std::isfinite(v)) {
      std::ostringstream os;
      os.precision(17);
      os << "integrand is not finite at (";
      for (std::size_t c = 0; c < m; ++c) os << (c ? ", " : "") << p[c];
      os << ")";
      throw std::domain_error(os.str());
    }
    terms.push_back(w * v * manifold.volume_density(p));
    std::size_t c = m;
    while (c > 0 && ++idx[c - 1] == grid.axes[c - 1].nodes.size()) idx[--c] = 0;
    if (c == 0) return pairwise_sum(terms);
  }
}

IntegralResult integrate(const ChartedManifold& manifold, const ScalarField& f, std::span<const std::size_t> sizes) {
  const Grid base = make_grid(manifold, sizes);
  std::vector<std::size_t> doubled;
  for (const auto& a : base.axes) doubled.push_back(2 * a.nodes.size());
  const Grid fine = make_grid(manifold, doubled);
  IntegralResult r;
  r.value = integrate_on(manifold, base, f);
  r.refined = integrate_on(manifold, fine, f);
  r.change = std::abs(r.refined - r.value);
  r.nodes = base.node_count();
  return r;
}

EulerCharacteristic euler_characteristic(const Immersion& imm, std::span<const std::size_t> sizes) {
  if (imm.dimension() != 2) throw DimensionMismatch("euler_characteristic needs a surface (m = 2)");
  const ChartedManifold& M = imm.source();
  const Grid grid = make_grid(M, sizes);
  const double total =
      integrate_on(M, grid, [&](std::span<const double> p) { return 0.5 * M.point_eval(p).scalar; });
  EulerCharacteristic e;
  e.raw = total / (2.0 * std::numbers::pi);
  e.chi = static_cast<int>(std::lround(e.raw));
  if (!(std::abs(e.raw - e.chi) < kEulerRoundingGap)) {
    throw GeometryError("Euler characteristic of '" + imm.name() + "' does not round cleanly: raw value " +
                        std::to_string(e.raw));
  }
  return e;
}

}  // namespace bitensor
