#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "bitensor/scenario.hpp"

namespace bitensor::detail {

enum class SubjectKind {
  None,       // the check builds its own subjects
  Map,        // a map, or the inclusion of an immersion
  Immersion,
  Manifold,   // a manifold, or the source of a map or immersion
};

/// What a check function sees: its spec, the scenario it belongs to and the
/// report it fills in. Parameter accessors throw ConfigError keyed by
/// "check[i].<key>".
class CheckContext {
 public:
  CheckContext(const Scenario& scenario, const CheckSpec& spec, const RunOptions& options, CheckReport& report);

  [[nodiscard]] std::string key(std::string_view k) const;
  [[nodiscard]] bool has(std::string_view k) const;
  [[nodiscard]] double number(std::string_view k, double fallback) const;
  /// A number, or an expression string without variables such as "2*pi^2".
  [[nodiscard]] double constant(std::string_view k) const;
  [[nodiscard]] std::size_t count(std::string_view k, std::size_t fallback) const;
  [[nodiscard]] std::string text(std::string_view k, std::string fallback) const;
  [[nodiscard]] std::vector<double> numbers(std::string_view k) const;
  [[nodiscard]] std::vector<Expr> expressions(std::string_view k, const std::vector<std::string>& vars) const;
  [[nodiscard]] Expr expression(std::string_view k, const std::vector<std::string>& vars) const;
  /// "expect" is "hold" (default) or "fail".
  [[nodiscard]] bool expect_hold() const;

  /// Declared tolerance, or `fallback`. Scaling happens in upper().
  [[nodiscard]] double tol(double fallback, std::string_view k = "tol") const;
  /// Explicit `points` list, or `points` (default `fallback`) sampled points.
  [[nodiscard]] std::vector<std::vector<double>> points(const ChartedManifold& manifold, std::size_t fallback);
  /// Quadrature sizes from --grid or the `grid` key; empty selects the defaults.
  [[nodiscard]] std::vector<std::size_t> grid();

  [[nodiscard]] const SmoothMap& map() const;
  [[nodiscard]] const Immersion& immersion() const;
  [[nodiscard]] const ChartedManifold& manifold() const;
  /// The subject as an immersion, or nullptr when it names something else.
  [[nodiscard]] const Immersion* subject_immersion() const;

  /// Records value <= tolerance · tol_scale.
  void upper(std::string name, double value, double tolerance);
  /// Records value >= tolerance (not scaled).
  void lower(std::string name, double value, double tolerance);
  /// upper() with `hold` when the check expects the property, lower() with
  /// `fail` otherwise; `largest` and `smallest` are taken over all points.
  void witness(std::string name, double largest, double smallest, double hold, double fail);

  [[nodiscard]] std::uint64_t seed() const noexcept { return report_.seed; }
  [[nodiscard]] CheckReport& report() noexcept { return report_; }

 private:
  [[nodiscard]] const nlohmann::json& get(std::string_view k) const;

  const Scenario& scenario_;
  const CheckSpec& spec_;
  const RunOptions& options_;
  CheckReport& report_;
};

using CheckFn = void (*)(CheckContext&);

struct CheckEntry {
  std::string_view kind;
  SubjectKind subject;
  std::vector<std::string_view> params;  // accepted keys besides kind, subject, name
  CheckFn run;
};

[[nodiscard]] std::span<const CheckEntry> check_registry();
[[nodiscard]] const CheckEntry* find_check(std::string_view kind);

}  // namespace bitensor::detail
