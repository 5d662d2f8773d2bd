#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <random>
#include <sstream>

#include "bitensor/scenario.hpp"
#include "cli.hpp"

namespace fs = std::filesystem;
using bitensor::cli::run;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

/// A scratch directory removed when the test ends.
struct Scratch {
  fs::path dir;
  Scratch() : dir(fs::temp_directory_path() / ("bitensor_cli_" + std::to_string(std::random_device{}()))) {
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(dir / name) << text;
    return dir / name;
  }
};

const char* const kSphere = R"toml(
[scenario]
name = "sphere"

[immersion.S]
coords = ["theta", "phi"]
domain = [[0, "pi", "polar"], [0, "2*pi", "periodic"]]
embedding = ["sin(theta)*cos(phi)", "sin(theta)*sin(phi)", "cos(theta)"]
metric = ["1", "0", "sin(theta)^2"]

[[check]]
kind = "mean-curvature"
subject = "S"
expected = 1
points = 10

[output]
report = "REPORT"
)toml";

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("list-scenarios") {
  const Outcome o = invoke({"list-scenarios"});
  CHECK(o.code == 0);
  std::size_t lines = 0;
  for (char c : o.out) lines += c == '\n';
  CHECK(lines >= 12);
  CHECK(o.out.find("cubic-curve-s2\tcubic curve γ(t) = t³a") != std::string::npos);
  CHECK(o.out.find("warped-product-projection\t") != std::string::npos);
  CHECK(invoke({"list-scenarios"}).out == o.out);
}

TEST_CASE("run a config file") {
  Scratch s;
  const fs::path report = s.dir / "out.json";
  std::string text = kSphere;
  text.replace(text.find("REPORT"), 6, report.generic_string());
  const fs::path cfg = s.write("sphere.toml", text);

  const Outcome o = invoke({"run", cfg.string()});
  CHECK(o.code == 0);
  CHECK(o.out.find("PASS sphere") != std::string::npos);
  const auto j = nlohmann::json::parse(slurp(report));
  CHECK(j["pass"] == true);
  CHECK(j["scenarios"][0]["checks"][0]["residuals"][0]["value"].is_string());

  const fs::path other = s.dir / "other.json";
  CHECK(invoke({"run", cfg.string(), "--report", other.string(), "--parallel"}).code == 0);
  CHECK(fs::exists(other));

  // A wrong expected value fails the check.
  text.replace(text.find("expected = 1"), 12, "expected = 1.0000001");
  const Outcome f = invoke({"run", s.write("wrong.toml", text).string()});
  CHECK(f.code == 1);
  CHECK(f.out.find("FAIL mean-curvature:S") != std::string::npos);
}

TEST_CASE("config errors exit with 2 and name the key") {
  Scratch s;
  const fs::path cfg = s.write("bad.toml", R"toml(
[manifold.M]
coords = ["x"]
domain = [[0, 1]]
metric = ["1"]

[map.f]
from = "Q"
to = "M"
components = ["x"]

[[check]]
kind = "bitension"
subject = "f"
)toml");
  const Outcome o = invoke({"run", cfg.string(), "--report", (s.dir / "r.json").string()});
  CHECK(o.code == 2);
  CHECK(o.err.find("map.f.from") != std::string::npos);
  CHECK(o.err.find("Q") != std::string::npos);

  CHECK(invoke({"run", (s.dir / "missing.toml").string()}).code == 2);
  CHECK(invoke({"run", "--scenario", "no-such-scenario"}).code == 2);
  CHECK(invoke({"run", "--tol-scale", "-1"}).code == 2);
  CHECK(invoke({"frobnicate"}).code == 2);
  CHECK(invoke({"run", s.write("syntax.toml", "x = [1,\n").string()}).err.find("line 2") != std::string::npos);
}

TEST_CASE("builtin scenario through the run command") {
  Scratch s;
  const fs::path report = s.dir / "r.json";
  const Outcome o = invoke({"run", "--scenario", "cubic-curve-s2", "--report", report.string()});
  CHECK(o.code == 0);
  const auto j = nlohmann::json::parse(slurp(report));
  CHECK(j["scenarios"][0]["anchor"] == bitensor::find_builtin("cubic-curve-s2")->anchor);
  CHECK(invoke({"run", "x.toml", "--scenario", "cubic-curve-s2"}).code == 2);
}

TEST_CASE("eval prints pointwise tensors") {
  const Outcome o = invoke({"eval", "--scenario", "small-sphere-inclusion", "--at", "β=0.7, γ=1.2", "--map", "inclusion"});
  REQUIRE(o.code == 0);
  const auto j = nlohmann::json::parse(o.out);
  CHECK(j["point"]["beta"] == 0.7);
  CHECK(j["map_data"]["image"][0].get<double>() == doctest::Approx(0.7853981633974483));
  CHECK(j["map_data"]["tau2"].size() == 3);
  CHECK(j["stress"]["S2"].size() == 2);
  CHECK(j["source"]["riemann"][0][0][0].size() == 2);

  Scratch s;
  std::string text = kSphere;
  const fs::path cfg = s.write("sphere.toml", text);
  const Outcome e = invoke({"eval", cfg.string(), "--at", "θ=0.7,φ=pi/3", "--map", "S"});
  REQUIRE(e.code == 0);
  const auto k = nlohmann::json::parse(e.out);
  CHECK(k["submanifold"]["H_norm_sq"].get<double>() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(k["submanifold"]["willmore_gradient"].size() == 3);

  CHECK(invoke({"eval", cfg.string(), "--at", "θ=0.7", "--map", "S"}).code == 2);
  CHECK(invoke({"eval", cfg.string(), "--at", "θ=0.7,ψ=1", "--map", "S"}).code == 2);
  CHECK(invoke({"eval", cfg.string(), "--at", "θ=0.7,φ=1", "--map", "T"}).code == 2);
  CHECK(invoke({"eval", cfg.string(), "--at", "θ=4,φ=1", "--map", "S"}).code == 1);
}

TEST_CASE("point parsing") {
  const std::vector<std::string> coords{"theta", "phi"};
  const auto p = bitensor::cli::parse_point("phi = 2*pi/3 , θ=0.5", coords);
  CHECK(p[0] == 0.5);
  CHECK(p[1] == doctest::Approx(2.0943951023931953));
  CHECK_THROWS_AS((void)bitensor::cli::parse_point("theta=1,theta=2,phi=0", coords), bitensor::ConfigError);
  CHECK_THROWS_AS((void)bitensor::cli::parse_point("theta 1,phi=0", coords), bitensor::ConfigError);
  CHECK_THROWS_AS((void)bitensor::cli::parse_point("theta=x,phi=0", coords), bitensor::ConfigError);
}
