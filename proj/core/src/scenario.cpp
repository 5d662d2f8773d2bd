#include "bitensor/scenario.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <future>
#include <limits>
#include <set>
#include <sstream>

#include "bitensor/errors.hpp"
#include "bitensor/parse.hpp"
#include "bitensor/toml.hpp"
#include "checks.hpp"

namespace bitensor {

namespace {

using nlohmann::json;

std::string join_key(const std::string& a, std::string_view b) { return a + "." + std::string(b); }

void reject_unknown(const json& table, const std::string& key, std::initializer_list<std::string_view> allowed) {
  for (const auto& [k, v] : table.items()) {
    bool ok = false;
    for (std::string_view a : allowed) ok = ok || k == a;
    if (!ok) throw ConfigError(join_key(key, k), "unknown key");
  }
}

const json& require(const json& table, const std::string& key, std::string_view field) {
  const auto it = table.find(field);
  if (it == table.end()) throw ConfigError(join_key(key, field), "missing required key");
  return *it;
}

std::string string_value(const json& v, const std::string& key) {
  if (!v.is_string()) throw ConfigError(key, "expected a string");
  return v.get<std::string>();
}

std::vector<std::string> string_list(const json& v, const std::string& key) {
  if (!v.is_array()) throw ConfigError(key, "expected an array of strings");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(string_value(v[i], key + "[" + std::to_string(i) + "]"));
  return out;
}

/// A number, "inf"/"-inf", or a constant expression such as "2*pi".
double bound_value(const json& v, const std::string& key) {
  if (v.is_number()) return v.get<double>();
  const std::string s = string_value(v, key);
  if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  try {
    return evaluate(parse(s, {}), {});
  } catch (const std::exception& e) {
    throw ConfigError(key, e.what());
  }
}

CoordinateKind kind_value(const json& v, const std::string& key) {
  if (v.is_boolean()) return v.get<bool>() ? CoordinateKind::Periodic : CoordinateKind::Bounded;
  const std::string s = string_value(v, key);
  if (s == "periodic") return CoordinateKind::Periodic;
  if (s == "polar") return CoordinateKind::Polar;
  if (s == "bounded") return CoordinateKind::Bounded;
  throw ConfigError(key, "expected true, false, \"periodic\", \"polar\" or \"bounded\"");
}

std::vector<CoordinateRange> domain_value(const json& table, const std::string& key, std::size_t m) {
  const auto it = table.find("domain");
  if (it == table.end()) {
    const double inf = std::numeric_limits<double>::infinity();
    return std::vector<CoordinateRange>(m, CoordinateRange{-inf, inf, CoordinateKind::Bounded});
  }
  const std::string dkey = join_key(key, "domain");
  if (!it->is_array() || it->size() != m) {
    throw ConfigError(dkey, "expected one [lo, hi] entry per coordinate (" + std::to_string(m) + ")");
  }
  std::vector<CoordinateRange> out;
  for (std::size_t i = 0; i < m; ++i) {
    const json& e = (*it)[i];
    const std::string ekey = dkey + "[" + std::to_string(i) + "]";
    if (!e.is_array() || e.size() < 2 || e.size() > 3) throw ConfigError(ekey, "expected [lo, hi] or [lo, hi, kind]");
    CoordinateRange r{bound_value(e[0], ekey), bound_value(e[1], ekey), CoordinateKind::Bounded};
    if (e.size() == 3) r.kind = kind_value(e[2], ekey);
    if (!(r.lo < r.hi)) throw ConfigError(ekey, "lower bound must be below upper bound");
    if (r.kind != CoordinateKind::Bounded && !(std::isfinite(r.lo) && std::isfinite(r.hi))) {
      throw ConfigError(ekey, "periodic and polar coordinates need finite bounds");
    }
    out.push_back(r);
  }
  return out;
}

std::vector<Expr> expression_list(const json& v, const std::string& key, const std::vector<std::string>& vars) {
  if (!v.is_array()) throw ConfigError(key, "expected an array of expression strings");
  std::vector<Expr> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string ekey = key + "[" + std::to_string(i) + "]";
    const json& e = v[i];
    if (e.is_number()) {
      out.push_back(Expr::constant(e.get<double>()));
      continue;
    }
    try {
      out.push_back(parse(string_value(e, ekey), vars));
    } catch (const ParseError& err) {
      throw ConfigError(ekey, err.what());
    }
  }
  return out;
}

std::vector<Expr> induced_metric(const std::vector<Expr>& embedding, const std::vector<std::string>& coords) {
  std::vector<Expr> upper;
  for (std::size_t i = 0; i < coords.size(); ++i) {
    for (std::size_t j = i; j < coords.size(); ++j) {
      Expr s;
      for (const Expr& x : embedding) s += differentiate(x, coords[i]) * differentiate(x, coords[j]);
      upper.push_back(s);
    }
  }
  return upper;
}

std::vector<std::string> coords_value(const json& table, const std::string& key) {
  auto coords = string_list(require(table, key, "coords"), join_key(key, "coords"));
  if (coords.empty()) throw ConfigError(join_key(key, "coords"), "at least one coordinate is required");
  std::set<std::string> seen;
  for (const auto& c : coords) {
    if (c == "pi") throw ConfigError(join_key(key, "coords"), "'pi' is reserved");
    if (!seen.insert(c).second) throw ConfigError(join_key(key, "coords"), "duplicate coordinate '" + c + "'");
  }
  return coords;
}

ManifoldPtr load_manifold(const std::string& name, const json& table) {
  const std::string key = "manifold." + name;
  if (!table.is_object()) throw ConfigError(key, "expected a table");
  reject_unknown(table, key, {"coords", "domain", "metric", "embedding"});
  const auto coords = coords_value(table, key);
  const std::size_t m = coords.size();
  auto domain = domain_value(table, key, m);
  const bool has_metric = table.contains("metric");
  const bool has_embedding = table.contains("embedding");
  if (has_metric == has_embedding) throw ConfigError(key, "give exactly one of 'metric' or 'embedding'");
  std::vector<Expr> upper;
  if (has_metric) {
    upper = expression_list(table["metric"], join_key(key, "metric"), coords);
    if (upper.size() != m * (m + 1) / 2) {
      throw ConfigError(join_key(key, "metric"),
                        "expected " + std::to_string(m * (m + 1) / 2) + " upper-triangle entries, got " +
                            std::to_string(upper.size()));
    }
  } else {
    upper = induced_metric(expression_list(table["embedding"], join_key(key, "embedding"), coords), coords);
  }
  auto M = std::make_shared<const ChartedManifold>(name, coords, std::move(domain), std::move(upper));
  try {
    M->validate_positive_definite();
  } catch (const GeometryError& e) {
    throw ConfigError(join_key(key, has_metric ? "metric" : "embedding"), e.what());
  }
  return M;
}

/// "R<n>" names flat Euclidean space with coordinates y1..yn.
ManifoldPtr euclidean_by_name(const std::string& name) {
  if (name.size() < 2 || name[0] != 'R') return nullptr;
  std::size_t n = 0;
  const auto r = std::from_chars(name.data() + 1, name.data() + name.size(), n);
  if (r.ec != std::errc() || r.ptr != name.data() + name.size() || n == 0 || n > 16) return nullptr;
  std::vector<std::string> coords;
  for (std::size_t i = 1; i <= n; ++i) coords.push_back("y" + std::to_string(i));
  return ChartedManifold::euclidean(name, std::move(coords));
}

ManifoldPtr resolve_manifold(Scenario& s, const std::string& name, const std::string& key) {
  if (auto it = s.manifolds.find(name); it != s.manifolds.end()) return it->second;
  if (auto it = s.immersions.find(name); it != s.immersions.end()) return it->second.inclusion().source_ptr();
  if (auto M = euclidean_by_name(name)) {
    s.manifolds.emplace(name, M);
    return M;
  }
  throw ConfigError(key, "undefined manifold '" + name + "'");
}

Immersion load_immersion(const std::string& name, const json& table) {
  const std::string key = "immersion." + name;
  if (!table.is_object()) throw ConfigError(key, "expected a table");
  reject_unknown(table, key, {"coords", "domain", "embedding", "metric"});
  const auto coords = coords_value(table, key);
  const std::size_t m = coords.size();
  auto domain = domain_value(table, key, m);
  auto embedding = expression_list(require(table, key, "embedding"), join_key(key, "embedding"), coords);
  if (embedding.size() <= m) throw ConfigError(join_key(key, "embedding"), "ambient dimension must exceed " + std::to_string(m));
  try {
    if (!table.contains("metric")) return Immersion::induced(name, coords, std::move(domain), std::move(embedding));
    auto upper = expression_list(table["metric"], join_key(key, "metric"), coords);
    if (upper.size() != m * (m + 1) / 2) {
      throw ConfigError(join_key(key, "metric"), "expected " + std::to_string(m * (m + 1) / 2) + " upper-triangle entries");
    }
    auto M = std::make_shared<const ChartedManifold>(name, coords, std::move(domain), std::move(upper));
    return Immersion(name, std::move(M), std::move(embedding));
  } catch (const GeometryError& e) {
    throw ConfigError(key, e.what());
  }
}

SmoothMap load_map(Scenario& s, const std::string& name, const json& table) {
  const std::string key = "map." + name;
  if (!table.is_object()) throw ConfigError(key, "expected a table");
  reject_unknown(table, key, {"from", "to", "components", "path"});
  const std::string from = string_value(require(table, key, "from"), join_key(key, "from"));
  const std::string to = string_value(require(table, key, "to"), join_key(key, "to"));
  ManifoldPtr source = resolve_manifold(s, from, join_key(key, "from"));
  ManifoldPtr target = resolve_manifold(s, to, join_key(key, "to"));
  auto components = expression_list(require(table, key, "components"), join_key(key, "components"), source->coords());
  if (components.size() != target->dimension()) {
    throw ConfigError(join_key(key, "components"), "expected " + std::to_string(target->dimension()) +
                                                        " components for target '" + to + "'");
  }
  TargetPath path = TargetPath::Automatic;
  if (table.contains("path")) {
    const std::string p = string_value(table["path"], join_key(key, "path"));
    if (p == "general") {
      path = TargetPath::General;
    } else if (p != "automatic") {
      throw ConfigError(join_key(key, "path"), "expected \"automatic\" or \"general\"");
    }
  }
  return SmoothMap(name, std::move(source), std::move(target), std::move(components), path);
}

CheckSpec load_check(const Scenario& s, const json& table, std::size_t index) {
  const std::string key = "check[" + std::to_string(index) + "]";
  if (!table.is_object()) throw ConfigError(key, "expected a table");
  CheckSpec spec;
  spec.index = index;
  spec.kind = string_value(require(table, key, "kind"), join_key(key, "kind"));
  const detail::CheckEntry* entry = detail::find_check(spec.kind);
  if (entry == nullptr) throw ConfigError(join_key(key, "kind"), "unregistered check kind '" + spec.kind + "'");

  if (table.contains("subject")) spec.subject = string_value(table["subject"], join_key(key, "subject"));
  const std::string skey = join_key(key, "subject");
  const auto known = [&](const auto& m) { return m.contains(spec.subject); };
  switch (entry->subject) {
    case detail::SubjectKind::None:
      if (!spec.subject.empty()) throw ConfigError(skey, "check '" + spec.kind + "' takes no subject");
      break;
    case detail::SubjectKind::Map:
      if (spec.subject.empty()) throw ConfigError(skey, "missing required key");
      if (!known(s.maps) && !known(s.immersions)) throw ConfigError(skey, "undefined map '" + spec.subject + "'");
      break;
    case detail::SubjectKind::Immersion:
      if (spec.subject.empty()) throw ConfigError(skey, "missing required key");
      if (!known(s.immersions)) throw ConfigError(skey, "undefined immersion '" + spec.subject + "'");
      break;
    case detail::SubjectKind::Manifold:
      if (spec.subject.empty()) throw ConfigError(skey, "missing required key");
      if (!known(s.manifolds) && !known(s.immersions) && !known(s.maps)) {
        throw ConfigError(skey, "undefined manifold '" + spec.subject + "'");
      }
      break;
  }

  spec.label = table.contains("name") ? string_value(table["name"], join_key(key, "name"))
                                      : (spec.subject.empty() ? spec.kind : spec.kind + ":" + spec.subject);
  spec.params = json::object();
  for (const auto& [k, v] : table.items()) {
    if (k == "kind" || k == "subject" || k == "name") continue;
    bool ok = false;
    for (std::string_view p : entry->params) ok = ok || k == p;
    if (!ok) throw ConfigError(join_key(key, k), "unknown parameter for check '" + spec.kind + "'");
    spec.params[k] = v;
  }
  return spec;
}

}  // namespace

Scenario load_scenario(const nlohmann::json& doc, const std::string& fallback_name) {
  if (!doc.is_object()) throw ConfigError("scenario", "document must be a table");
  for (const auto& [k, v] : doc.items()) {
    if (k != "scenario" && k != "manifold" && k != "map" && k != "immersion" && k != "check" && k != "output") {
      throw ConfigError(k, "unknown section");
    }
  }

  Scenario s;
  s.name = fallback_name;
  if (doc.contains("scenario")) {
    const json& head = doc["scenario"];
    if (!head.is_object()) throw ConfigError("scenario", "expected a table");
    reject_unknown(head, "scenario", {"name", "anchor", "seed"});
    if (head.contains("name")) s.name = string_value(head["name"], "scenario.name");
    if (head.contains("anchor")) s.anchor = string_value(head["anchor"], "scenario.anchor");
    if (head.contains("seed")) {
      const json& seed = head["seed"];
      if (!seed.is_number_integer() || seed.get<std::int64_t>() < 0) {
        throw ConfigError("scenario.seed", "expected a non-negative integer");
      }
      s.seed = seed.get<std::uint64_t>();
    }
  }

  const auto section = [&](const char* name) -> const json* {
    const auto it = doc.find(name);
    if (it == doc.end()) return nullptr;
    if (!it->is_object()) throw ConfigError(name, "expected a table of named entries");
    return &*it;
  };
  std::set<std::string> names;
  const auto claim = [&](const std::string& kind, const std::string& name) {
    if (!names.insert(name).second) throw ConfigError(kind + "." + name, "name already used by another entry");
  };

  if (const json* t = section("manifold")) {
    for (const auto& [name, table] : t->items()) {
      claim("manifold", name);
      s.manifolds.emplace(name, load_manifold(name, table));
    }
  }
  if (const json* t = section("immersion")) {
    for (const auto& [name, table] : t->items()) {
      claim("immersion", name);
      s.immersions.emplace(name, load_immersion(name, table));
    }
  }
  if (const json* t = section("map")) {
    for (const auto& [name, table] : t->items()) {
      claim("map", name);
      s.maps.emplace(name, load_map(s, name, table));
    }
  }

  if (doc.contains("check")) {
    const json& checks = doc["check"];
    if (!checks.is_array()) throw ConfigError("check", "expected [[check]] entries");
    for (std::size_t i = 0; i < checks.size(); ++i) s.checks.push_back(load_check(s, checks[i], i));
  }
  if (s.checks.empty()) throw ConfigError("check", "scenario declares no checks");

  if (doc.contains("output")) {
    const json& out = doc["output"];
    if (!out.is_object()) throw ConfigError("output", "expected a table");
    reject_unknown(out, "output", {"report"});
    if (out.contains("report")) s.report_path = string_value(out["report"], "output.report");
  }
  return s;
}

Scenario load_scenario_text(std::string_view toml, const std::string& fallback_name) {
  json doc;
  try {
    doc = parse_toml(toml);
  } catch (const TomlError& e) {
    throw ConfigError("toml", e.what());
  }
  return load_scenario(doc, fallback_name);
}

Scenario load_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config", "cannot open '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return load_scenario_text(text.str(), path.stem().string());
}

bool Residual::passes() const noexcept {
  if (std::isnan(value)) return false;
  return bound == Bound::Upper ? value <= tolerance : value >= tolerance;
}

bool CheckReport::pass() const noexcept {
  if (!error.empty() || residuals.empty()) return false;
  for (const Residual& r : residuals) {
    if (!r.passes()) return false;
  }
  return true;
}

bool ScenarioReport::pass() const noexcept {
  for (const CheckReport& c : checks) {
    if (!c.pass()) return false;
  }
  return !checks.empty();
}

std::vector<std::string> registered_checks() {
  std::vector<std::string> out;
  for (const auto& e : detail::check_registry()) out.emplace_back(e.kind);
  return out;
}

bool is_registered_check(std::string_view kind) { return detail::find_check(kind) != nullptr; }

namespace {

CheckReport run_check(const Scenario& scenario, const CheckSpec& spec, const RunOptions& options) {
  CheckReport report;
  report.name = spec.label;
  report.kind = spec.kind;
  report.subject = spec.subject;
  report.seed = scenario.seed;
  const auto start = std::chrono::steady_clock::now();
  try {
    detail::CheckContext ctx(scenario, spec, options, report);
    detail::find_check(spec.kind)->run(ctx);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    report.error = e.what();
  }
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace

ScenarioReport run_scenario(const Scenario& scenario, const RunOptions& options) {
  ScenarioReport out;
  out.name = scenario.name;
  out.anchor = scenario.anchor;
  out.seed = scenario.seed;
  if (options.parallel) {
    std::vector<std::future<CheckReport>> pending;
    for (const CheckSpec& spec : scenario.checks) {
      pending.push_back(std::async(std::launch::async, [&scenario, &spec, &options] {
        return run_check(scenario, spec, options);
      }));
    }
    for (auto& f : pending) out.checks.push_back(f.get());
  } else {
    for (const CheckSpec& spec : scenario.checks) out.checks.push_back(run_check(scenario, spec, options));
  }
  return out;
}

std::string format_residual(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::scientific, 16);
  return std::string(buf, r.ptr);
}

nlohmann::json report_json(std::span<const ScenarioReport> reports) {
  json scenarios = json::array();
  bool all = true;
  for (const ScenarioReport& s : reports) {
    json checks = json::array();
    for (const CheckReport& c : s.checks) {
      json residuals = json::array();
      for (const Residual& r : c.residuals) {
        residuals.push_back({{"name", r.name},
                             {"value", format_residual(r.value)},
                             {"tolerance", format_residual(r.tolerance)},
                             {"bound", r.bound == Bound::Upper ? "upper" : "lower"},
                             {"pass", r.passes()}});
      }
      json entry = {{"name", c.name},     {"kind", c.kind},           {"subject", c.subject},
                    {"seed", c.seed},     {"points", c.points},       {"grid", c.grid},
                    {"pass", c.pass()},   {"residuals", residuals},   {"wall_seconds", c.wall_seconds}};
      if (!c.error.empty()) entry["error"] = c.error;
      checks.push_back(std::move(entry));
    }
    all = all && s.pass();
    scenarios.push_back({{"name", s.name}, {"anchor", s.anchor}, {"seed", s.seed}, {"pass", s.pass()}, {"checks", checks}});
  }
  return {{"pass", all}, {"scenarios", scenarios}};
}

}  // namespace bitensor
