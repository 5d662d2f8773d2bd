#include "bitensor/smooth_map.hpp"

#include <cmath>
#include <map>
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

}  // namespace

SmoothMap::SmoothMap(std::string name, ManifoldPtr source, ManifoldPtr target, std::vector<Expr> components,
                     TargetPath path)
    : name_(std::move(name)),
      source_(std::move(source)),
      target_(std::move(target)),
      components_(std::move(components)),
      path_(path) {
  if (!source_ || !target_) throw std::invalid_argument("SmoothMap '" + name_ + "': null manifold");
  const std::size_t m = source_->dimension();
  const std::size_t n = target_->dimension();
  if (components_.size() != n) {
    throw DimensionMismatch("map '" + name_ + "' needs " + std::to_string(n) + " components for target '" +
                            target_->name() + "'");
  }
  for (const Expr& c : components_) {
    for (const auto& v : free_variables(c)) {
      if (std::find(source_->coords().begin(), source_->coords().end(), v) == source_->coords().end()) {
        throw std::invalid_argument("map '" + name_ + "': component uses '" + v + "', not a coordinate of '" +
                                    source_->name() + "'");
      }
    }
  }
  flat_target_ = target_->is_flat() && path_ == TargetPath::Automatic;
  const auto& x = source_->coords();
  const auto& ginv = source_->inverse_metric();
  const auto& gamma_m = source_->christoffel();

  std::map<std::string, Expr, std::less<>> along;
  for (std::size_t a = 0; a < n; ++a) along.emplace(target_->coords()[a], components_[a]);

  dphi_ = ExprTensor({n, m});
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t i = 0; i < m; ++i) dphi_(a, i) = differentiate(components_[a], x[i]);
  }

  h_ = ExprTensor({n, n});
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a; b < n; ++b) {
      h_(a, b) = substitute(target_->metric()(a, b), along);
      h_(b, a) = h_(a, b);
    }
  }

  target_christoffel_ = ExprTensor({n, n, n});
  if (!flat_target_) {
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        for (std::size_t c = b; c < n; ++c) {
          target_christoffel_(a, b, c) = substitute(target_->christoffel()(a, b, c), along);
          target_christoffel_(a, c, b) = target_christoffel_(a, b, c);
        }
      }
    }
  }

  // (∇dφ)^α_ij = ∂_i∂_j φ^α − ^MΓ^k_ij φ^α_k + ^NΓ^α_βγ φ^β_i φ^γ_j
  nabla_dphi_ = ExprTensor({n, m, m});
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = i; j < m; ++j) {
        Expr e = differentiate(dphi_(a, i), x[j]);
        for (std::size_t k = 0; k < m; ++k) e -= gamma_m(k, i, j) * dphi_(a, k);
        if (!flat_target_) {
          for (std::size_t b = 0; b < n; ++b) {
            for (std::size_t c = 0; c < n; ++c) e += target_christoffel_(a, b, c) * dphi_(b, i) * dphi_(c, j);
          }
        }
        nabla_dphi_(a, i, j) = e;
        nabla_dphi_(a, j, i) = e;
      }
    }
  }

  tau_.assign(n, Expr());
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) tau_[a] += ginv(i, j) * nabla_dphi_(a, i, j);
    }
  }

  // (∇_i τ)^α = ∂_i τ^α + ^NΓ^α_βγ τ^β φ^γ_i
  nabla_tau_ = ExprTensor({n, m});
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t i = 0; i < m; ++i) {
      Expr e = differentiate(tau_[a], x[i]);
      if (!flat_target_) {
        for (std::size_t b = 0; b < n; ++b) {
          for (std::size_t c = 0; c < n; ++c) e += target_christoffel_(a, b, c) * tau_[b] * dphi_(c, i);
        }
      }
      nabla_tau_(a, i) = e;
    }
  }

  d_nabla_tau_ = ExprTensor({n, m, m});
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) d_nabla_tau_(a, i, j) = differentiate(nabla_tau_(a, i), x[j]);
    }
  }

  pullback_ = ExprTensor({m, m});
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i; j < m; ++j) {
      Expr e;
      for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) e += h_(a, b) * dphi_(a, i) * dphi_(b, j);
      }
      pullback_(i, j) = e;
      pullback_(j, i) = e;
    }
  }
  energy_ = Expr();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) energy_ += ginv(i, j) * pullback_(i, j);
  }
  energy_ = Expr(0.5) * energy_;

  std::vector<Expr> outputs(components_);
  append(outputs, dphi_);
  append(outputs, h_);
  append(outputs, target_christoffel_);
  append(outputs, nabla_dphi_);
  outputs.insert(outputs.end(), tau_.begin(), tau_.end());
  append(outputs, nabla_tau_);
  append(outputs, d_nabla_tau_);
  outputs.push_back(energy_);
  append(outputs, pullback_);
  program_ = Program(outputs, x);
}

SmoothMap SmoothMap::with_source(ManifoldPtr source, std::string name) const {
  if (source->coords() != source_->coords()) {
    throw DimensionMismatch("with_source: replacement manifold must use the same coordinates");
  }
  return SmoothMap(std::move(name), std::move(source), target_, components_, path_);
}

MapPointData SmoothMap::evaluate(std::span<const double> p) const {
  const std::size_t m = source_->dimension();
  const std::size_t n = target_->dimension();
  const PointEval src = source_->point_eval(p);

  MapPointData d;
  d.point.assign(p.begin(), p.end());
  d.image.resize(n);
  d.dphi = RealTensor({n, m});
  d.target_metric = RealTensor({n, n});
  RealTensor gamma_n({n, n, n});
  d.nabla_dphi = RealTensor({n, m, m});
  d.tau.resize(n);
  d.nabla_tau = RealTensor({n, m});
  RealTensor d_nabla_tau({n, m, m});
  d.pullback_metric = RealTensor({m, m});

  const std::vector<double> values = program_.evaluate(p);
  std::span<const double> rest(values);
  take(rest, d.image);
  take(rest, d.dphi);
  take(rest, d.target_metric);
  take(rest, gamma_n);
  take(rest, d.nabla_dphi);
  take(rest, d.tau);
  take(rest, d.nabla_tau);
  take(rest, d_nabla_tau);
  d.energy_density = rest.front();
  rest = rest.subspan(1);
  take(rest, d.pullback_metric);

  if (!target_->contains(d.image)) {
    std::ostringstream os;
    os.precision(17);
    os << "map '" << name_ << "' sends a point outside the domain of '" << target_->name() << "': image (";
    for (std::size_t a = 0; a < n; ++a) os << (a ? ", " : "") << d.image[a];
    os << ")";
    throw DomainViolation(os.str());
  }

  // −Δτ = trace ∇²τ with ∇²_{j,i}τ = ∇_j(∇_i τ) − ∇_{∇_j ∂_i} τ
  d.tau2.assign(n, 0.0);
  for (std::size_t a = 0; a < n; ++a) {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        const double gij = src.g_inv(i, j);
        if (gij == 0.0) continue;
        double second = d_nabla_tau(a, i, j);
        if (!flat_target_) {
          for (std::size_t b = 0; b < n; ++b) {
            for (std::size_t c = 0; c < n; ++c) second += gamma_n(a, b, c) * d.nabla_tau(b, i) * d.dphi(c, j);
          }
        }
        for (std::size_t k = 0; k < m; ++k) second -= src.christoffel(k, j, i) * d.nabla_tau(a, k);
        s += gij * second;
      }
    }
    d.tau2[a] = s;
  }
  if (!flat_target_) {
    const PointEval tgt = target_->point_eval(d.image);
    // trace R^N(dφ e_i, τ) dφ e_i = g^ij R^α_βγδ φ^β_i τ^γ φ^δ_j
    for (std::size_t a = 0; a < n; ++a) {
      double s = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
          const double gij = src.g_inv(i, j);
          if (gij == 0.0) continue;
          for (std::size_t b = 0; b < n; ++b) {
            for (std::size_t c = 0; c < n; ++c) {
              for (std::size_t e = 0; e < n; ++e) {
                s += gij * tgt.riemann(a, b, c, e) * d.dphi(b, i) * d.tau[c] * d.dphi(e, j);
              }
            }
          }
        }
      }
      d.tau2[a] -= s;
    }
  }
  return d;
}

std::vector<double> tension(const SmoothMap& phi, std::span<const double> p) { return phi.evaluate(p).tau; }

std::vector<double> bitension(const SmoothMap& phi, std::span<const double> p) { return phi.evaluate(p).tau2; }

double target_inner(const RealTensor& h, std::span<const double> a, std::span<const double> b) {
  const std::size_t n = a.size();
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) s += h(i, j) * a[i] * b[j];
  }
  return s;
}

double target_norm(const RealTensor& h, std::span<const double> a) {
  return std::sqrt(std::max(0.0, target_inner(h, a, a)));
}

std::vector<double> column(const RealTensor& t, std::size_t i) {
  std::vector<double> out(t.dim(0));
  for (std::size_t a = 0; a < out.size(); ++a) out[a] = t(a, i);
  return out;
}

}  // namespace bitensor
