#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "bitensor/submanifold.hpp"

namespace bitensor {

/// A scenario file that cannot be used as written. `key()` is the dotted
/// path of the offending entry, e.g. "map.phi.from".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error(key + ": " + message), key_(std::move(key)) {}
  [[nodiscard]] const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

struct CheckSpec {
  std::string kind;
  std::string subject;  // empty for checks that build their own subjects
  std::string label;    // "name" key, defaults to "kind:subject"
  nlohmann::json params;
  std::size_t index = 0;
};

struct Scenario {
  std::string name;
  std::string anchor;
  std::uint64_t seed = 1;
  std::map<std::string, ManifoldPtr> manifolds;
  std::map<std::string, SmoothMap> maps;
  std::map<std::string, Immersion> immersions;
  std::vector<CheckSpec> checks;
  std::string report_path;
};

/// Builds a scenario from a parsed document. Every referenced name must
/// resolve and every check kind must be registered; violations throw
/// ConfigError.
[[nodiscard]] Scenario load_scenario(const nlohmann::json& doc, const std::string& fallback_name);
[[nodiscard]] Scenario load_scenario_text(std::string_view toml, const std::string& fallback_name);
[[nodiscard]] Scenario load_scenario_file(const std::filesystem::path& path);

enum class Bound {
  Upper,  // passes when value <= tolerance
  Lower,  // passes when value >= tolerance (negative witnesses)
};

struct Residual {
  std::string name;
  double value = 0.0;
  double tolerance = 0.0;
  Bound bound = Bound::Upper;
  [[nodiscard]] bool passes() const noexcept;
};

struct CheckReport {
  std::string name;
  std::string kind;
  std::string subject;
  std::uint64_t seed = 0;
  std::vector<Residual> residuals;
  std::size_t points = 0;
  std::vector<std::size_t> grid;
  std::string error;  // evaluation failure, if any
  double wall_seconds = 0.0;
  [[nodiscard]] bool pass() const noexcept;
};

struct ScenarioReport {
  std::string name;
  std::string anchor;
  std::uint64_t seed = 0;
  std::vector<CheckReport> checks;
  [[nodiscard]] bool pass() const noexcept;
};

struct RunOptions {
  double tol_scale = 1.0;                 // multiplies every upper-bound tolerance
  std::optional<std::size_t> grid;        // overrides quadrature node counts
  bool parallel = false;                  // run the checks of a scenario concurrently
};

[[nodiscard]] std::vector<std::string> registered_checks();
[[nodiscard]] bool is_registered_check(std::string_view kind);

/// Runs every check. Geometry failures inside a check are recorded in its
/// report; ConfigError escapes.
[[nodiscard]] ScenarioReport run_scenario(const Scenario& scenario, const RunOptions& options = {});

/// Decimal string with 17 significant digits, independent of locale.
[[nodiscard]] std::string format_residual(double value);

/// One JSON document for a run. Timing fields are the only entries that
/// differ between identical runs.
[[nodiscard]] nlohmann::json report_json(std::span<const ScenarioReport> reports);

struct BuiltinScenario {
  std::string name;
  std::string anchor;
  std::string toml;
};

/// Curated scenarios, in a fixed order.
[[nodiscard]] const std::vector<BuiltinScenario>& builtin_scenarios();
[[nodiscard]] const BuiltinScenario* find_builtin(std::string_view name);

}  // namespace bitensor
