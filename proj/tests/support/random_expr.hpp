#pragma once

#include <random>
#include <string>
#include <vector>

#include "bitensor/expr.hpp"

namespace bitensor::testing {

/// Random polynomial/trigonometric expressions over a fixed variable set.
/// Compositions are kept bounded on [-1, 1]^k so finite differences stay
/// meaningful; every rule of the grammar shows up with some probability.
class RandomExprGenerator {
 public:
  RandomExprGenerator(std::vector<std::string> vars, std::uint64_t seed) : vars_(std::move(vars)), rng_(seed) {}

  Expr generate(int depth) {
    if (depth <= 0 || pick(0, 9) < 2) return leaf();
    const Expr a = generate(depth - 1);
    switch (pick(0, 11)) {
      case 0: return a + generate(depth - 1);
      case 1: return a - generate(depth - 1);
      case 2:
      case 3: return a * generate(depth - 1);
      case 4: return sin(a);
      case 5: return cos(a);
      case 6: return pow(a, static_cast<double>(pick(2, 3)));
      case 7: return a / (Expr(2.5) + cos(generate(depth - 1)));
      case 8: return exp(Expr(0.5) * sin(a));
      case 9: return log(Expr(2.0) + sin(a));
      case 10: return sqrt(Expr(1.5) + cos(a));
      default: return sinh(Expr(0.5) * sin(a)) + cosh(Expr(0.3) * cos(a)) - tan(Expr(0.4) * sin(a));
    }
  }

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

 private:
  int pick(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  Expr leaf() {
    if (pick(0, 3) == 0) return Expr::constant(std::round(uniform(-2.0, 2.0) * 100.0) / 100.0);
    return Expr::variable(vars_[static_cast<std::size_t>(pick(0, static_cast<int>(vars_.size()) - 1))]);
  }

  std::vector<std::string> vars_;
  std::mt19937_64 rng_;
};

}  // namespace bitensor::testing
