#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <optional>

#include "bitensor/errors.hpp"
#include "bitensor/parse.hpp"
#include "bitensor/scenario.hpp"
#include "bitensor/toml.hpp"

namespace bitensor::cli {

namespace {

using nlohmann::json;

constexpr std::array<std::pair<std::string_view, std::string_view>, 16> kGreek{{
    {"α", "alpha"}, {"β", "beta"},  {"γ", "gamma"}, {"δ", "delta"}, {"θ", "theta"}, {"ϑ", "theta"},
    {"φ", "phi"},   {"ϕ", "phi"},   {"ψ", "psi"},   {"ρ", "rho"},   {"σ", "sigma"}, {"τ", "tau"},
    {"χ", "chi"},   {"η", "eta"},   {"ξ", "xi"},    {"ω", "omega"},
}};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

std::string spelled(const std::string& name) {
  for (const auto& [glyph, word] : kGreek) {
    if (name == glyph) return std::string(word);
  }
  return name;
}

json tensor_json(const RealTensor& t) {
  const auto& d = t.dims();
  const std::function<json(std::size_t, std::size_t)> level = [&](std::size_t axis, std::size_t offset) -> json {
    json out = json::array();
    std::size_t stride = 1;
    for (std::size_t k = axis + 1; k < d.size(); ++k) stride *= d[k];
    for (std::size_t i = 0; i < d[axis]; ++i) {
      if (axis + 1 == d.size()) {
        out.push_back(t.data()[offset + i]);
      } else {
        out.push_back(level(axis + 1, offset + i * stride));
      }
    }
    return out;
  };
  return t.size() == 0 ? json::array() : level(0, 0);
}

Scenario load_selected(const std::string& config, const std::string& builtin) {
  if (!config.empty() && !builtin.empty()) throw ConfigError("scenario", "give either a config file or --scenario");
  if (!config.empty()) return load_scenario_file(config);
  const BuiltinScenario* b = find_builtin(builtin);
  if (b == nullptr) throw ConfigError("scenario", "unknown builtin scenario '" + builtin + "'");
  return load_scenario_text(b->toml, b->name);
}

void print_summary(const ScenarioReport& s, std::ostream& out) {
  out << (s.pass() ? "PASS " : "FAIL ") << s.name << " (" << s.checks.size() << " checks)\n";
  for (const CheckReport& c : s.checks) {
    if (c.pass()) continue;
    out << "  FAIL " << c.name;
    if (!c.error.empty()) out << ": " << c.error;
    out << "\n";
    for (const Residual& r : c.residuals) {
      if (r.passes()) continue;
      out << "    " << r.name << " = " << format_residual(r.value)
          << (r.bound == Bound::Upper ? " > " : " < ") << format_residual(r.tolerance) << "\n";
    }
  }
}

struct RunArgs {
  std::string config;
  std::vector<std::string> scenarios;
  std::optional<std::size_t> grid;
  double tol_scale = 1.0;
  bool parallel = false;
  std::string report;
};

int run_command(const RunArgs& a, std::ostream& out) {
  std::vector<Scenario> selected;
  if (!a.config.empty() && !a.scenarios.empty()) {
    throw ConfigError("scenario", "give either a config file or --scenario");
  }
  if (!a.config.empty()) {
    selected.push_back(load_scenario_file(a.config));
  } else if (!a.scenarios.empty()) {
    for (const auto& n : a.scenarios) selected.push_back(load_selected("", n));
  } else {
    for (const auto& b : builtin_scenarios()) selected.push_back(load_scenario_text(b.toml, b.name));
  }

  RunOptions options;
  options.tol_scale = a.tol_scale;
  options.grid = a.grid;
  options.parallel = a.parallel;
  std::vector<ScenarioReport> reports;
  for (const Scenario& s : selected) {
    reports.push_back(run_scenario(s, options));
    print_summary(reports.back(), out);
  }

  std::string path = a.report;
  if (path.empty() && selected.size() == 1) path = selected.front().report_path;
  if (path.empty()) path = "bitensor-report.json";
  std::ofstream file(path, std::ios::binary);
  if (!file) throw ConfigError("report", "cannot write '" + path + "'");
  file << report_json(reports).dump(2) << "\n";
  out << "report: " << path << "\n";

  const bool pass = std::all_of(reports.begin(), reports.end(), [](const ScenarioReport& r) { return r.pass(); });
  return pass ? kExitPass : kExitCheckFailure;
}

json eval_json(const Scenario& s, const std::string& name, const std::string& at) {
  const Immersion* imm = nullptr;
  const SmoothMap* phi = nullptr;
  if (auto it = s.immersions.find(name); it != s.immersions.end()) {
    imm = &it->second;
    phi = &imm->inclusion();
  } else if (auto jt = s.maps.find(name); jt != s.maps.end()) {
    phi = &jt->second;
  } else {
    throw ConfigError("map", "undefined map '" + name + "'");
  }
  const ChartedManifold& M = phi->source();
  const std::vector<double> p = parse_point(at, M.coords());

  const PointEval pe = M.point_eval(p);
  const MapPointData d = phi->evaluate(p);
  const StressTensors st = StressEnergy(*phi).evaluate(d);

  json point = json::object();
  for (std::size_t i = 0; i < p.size(); ++i) point[M.coords()[i]] = p[i];
  json out = {
      {"map", name},
      {"point", point},
      {"source",
       {{"g", tensor_json(pe.g)},
        {"g_inv", tensor_json(pe.g_inv)},
        {"sqrt_det_g", pe.sqrt_det_g},
        {"christoffel", tensor_json(pe.christoffel)},
        {"riemann", tensor_json(pe.riemann)},
        {"ricci", tensor_json(pe.ricci)},
        {"scalar", pe.scalar}}},
      {"map_data",
       {{"image", d.image},
        {"dphi", tensor_json(d.dphi)},
        {"energy_density", d.energy_density},
        {"pullback_metric", tensor_json(d.pullback_metric)},
        {"target_metric", tensor_json(d.target_metric)},
        {"nabla_dphi", tensor_json(d.nabla_dphi)},
        {"tau", d.tau},
        {"nabla_tau", tensor_json(d.nabla_tau)},
        {"tau2", d.tau2}}},
      {"stress",
       {{"S", tensor_json(st.S)},
        {"S2", tensor_json(st.S2)},
        {"div_S", st.div_S},
        {"div_S2", st.div_S2},
        {"tau_pairing", st.tau_pairing},
        {"tau2_pairing", st.tau2_pairing}}},
  };
  if (imm != nullptr) {
    const SubmanifoldPointData sd = imm->evaluate(p);
    json sub = {{"position", sd.position},
                {"B", tensor_json(sd.B)},
                {"H", sd.H},
                {"H_norm_sq", sd.H_norm_sq},
                {"HdotB", tensor_json(sd.HdotB)},
                {"pseudo_umbilic_residual", tensor_json(sd.pseudo_umbilic_residual)},
                {"S_traceless", tensor_json(sd.S_traceless)},
                {"nabla_perp_H", tensor_json(sd.nabla_perp_H)},
                {"gauss_pullback", tensor_json(sd.gauss_pullback)},
                {"gauss_energy", sd.gauss_energy},
                {"S_G", tensor_json(sd.S_G)}};
    if (imm->dimension() == 2) sub["willmore_gradient"] = sd.willmore_gradient;
    out["submanifold"] = std::move(sub);
  }
  return out;
}

}  // namespace

std::vector<double> parse_point(const std::string& spec, const std::vector<std::string>& coords) {
  std::vector<std::optional<double>> values(coords.size());
  std::size_t start = 0;
  while (start <= spec.size()) {
    const std::size_t comma = std::min(spec.find(',', start), spec.size());
    const std::string item = trim(std::string_view(spec).substr(start, comma - start));
    start = comma + 1;
    if (item.empty()) continue;
    const std::size_t eq = item.find('=');
    if (eq == std::string::npos) throw ConfigError("at", "expected name=value, got '" + item + "'");
    const std::string name = spelled(trim(std::string_view(item).substr(0, eq)));
    const auto it = std::find(coords.begin(), coords.end(), name);
    if (it == coords.end()) throw ConfigError("at", "unknown coordinate '" + name + "'");
    auto& slot = values[static_cast<std::size_t>(it - coords.begin())];
    if (slot) throw ConfigError("at", "coordinate '" + name + "' given twice");
    try {
      slot = evaluate(parse(trim(std::string_view(item).substr(eq + 1)), {}), {});
    } catch (const std::exception& e) {
      throw ConfigError("at", "value of '" + name + "': " + e.what());
    }
  }
  std::vector<double> p;
  for (std::size_t i = 0; i < coords.size(); ++i) {
    if (!values[i]) throw ConfigError("at", "missing coordinate '" + coords[i] + "'");
    p.push_back(*values[i]);
  }
  return p;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Evaluate and verify stress-energy identities of harmonic and biharmonic maps", "bitensor"};
  app.require_subcommand(1);

  RunArgs ra;
  std::size_t grid = 0;
  auto* run_cmd = app.add_subcommand("run", "Run a scenario file or builtin scenarios and write a JSON report");
  run_cmd->add_option("config", ra.config, "Scenario file (TOML)");
  run_cmd->add_option("--scenario", ra.scenarios, "Builtin scenario name; repeatable. Default: all builtins");
  auto* grid_opt = run_cmd->add_option("--grid", grid, "Quadrature nodes per coordinate")->check(CLI::PositiveNumber);
  run_cmd->add_option("--tol-scale", ra.tol_scale, "Multiply every upper tolerance")->check(CLI::PositiveNumber);
  run_cmd->add_flag("--parallel", ra.parallel, "Run the checks of a scenario concurrently");
  run_cmd->add_option("--report", ra.report, "Report path");

  auto* list_cmd = app.add_subcommand("list-scenarios", "List builtin scenarios with their anchors");

  std::string eval_config, eval_scenario, at, map_name;
  auto* eval_cmd = app.add_subcommand("eval", "Print all pointwise tensors of a map or immersion as JSON");
  eval_cmd->add_option("config", eval_config, "Scenario file (TOML)");
  eval_cmd->add_option("--scenario", eval_scenario, "Builtin scenario to take the map from");
  eval_cmd->add_option("--at", at, "Point, e.g. \"theta=0.7,phi=1.2\"")->required();
  eval_cmd->add_option("--map", map_name, "Map or immersion name")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitPass;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return e.get_exit_code() == 0 ? kExitPass : kExitConfigError;
  }

  try {
    if (run_cmd->parsed()) {
      if (grid_opt->count() > 0) ra.grid = grid;
      return run_command(ra, out);
    }
    if (list_cmd->parsed()) {
      for (const BuiltinScenario& b : builtin_scenarios()) out << b.name << "\t" << b.anchor << "\n";
      return kExitPass;
    }
    const Scenario s = load_selected(eval_config, eval_scenario);
    out << eval_json(s, map_name, at).dump(2) << "\n";
    return kExitPass;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const GeometryError& e) {
    err << "evaluation failed: " << e.what() << "\n";
    return kExitCheckFailure;
  } catch (const std::domain_error& e) {
    err << "evaluation failed: " << e.what() << "\n";
    return kExitCheckFailure;
  }
}

}  // namespace bitensor::cli
