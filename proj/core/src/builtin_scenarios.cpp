#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

#include "bitensor/corpus.hpp"
#include "bitensor/scenario.hpp"
#include "bitensor/toml.hpp"

namespace bitensor {

namespace {

std::string toml_string(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::string number(double v) {
  if (std::isinf(v)) return v > 0 ? "\"inf\"" : "\"-inf\"";
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, r.ptr);
  if (s.find_first_of(".en") == std::string::npos) s += ".0";
  return s;
}

template <class T, class F>
std::string list(const std::vector<T>& items, F&& render) {
  std::string out = "[";
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? ", " : "") + render(items[i]);
  return out + "]";
}

std::string expr_list(const std::vector<Expr>& e) {
  return list(e, [](const Expr& x) { return toml_string(to_string(x)); });
}

/// Renders corpus objects as scenario TOML, so curated scenarios go through
/// the same loader as user files.
class Writer {
 public:
  Writer(std::string_view name, std::string_view anchor, std::uint64_t seed = 1) {
    out_ << "[scenario]\nname = " << toml_string(name) << "\nanchor = " << toml_string(anchor) << "\nseed = " << seed << "\n";
  }

  void manifold(std::string_view key, const ChartedManifold& M) {
    out_ << "\n[manifold." << key << "]\n";
    chart(M);
    out_ << "metric = " << expr_list(M.metric_upper()) << "\n";
  }

  void immersion(std::string_view key, const Immersion& imm) {
    out_ << "\n[immersion." << key << "]\n";
    chart(imm.source());
    out_ << "embedding = " << expr_list(imm.embedding()) << "\n";
    out_ << "metric = " << expr_list(imm.source().metric_upper()) << "\n";
  }

  /// Writes the map together with its source and target charts.
  void map(std::string_view key, const SmoothMap& phi) {
    const std::string from = std::string(key) + "_source", to = std::string(key) + "_target";
    manifold(from, phi.source());
    manifold(to, phi.target());
    out_ << "\n[map." << key << "]\nfrom = " << toml_string(from) << "\nto = " << toml_string(to)
         << "\ncomponents = " << expr_list(phi.components()) << "\n";
  }

  /// `params` are ready-made TOML lines such as "tol = 1e-9".
  void check(std::string_view kind, std::string_view subject, std::initializer_list<std::string_view> params = {}) {
    out_ << "\n[[check]]\nkind = " << toml_string(kind) << "\n";
    if (!subject.empty()) out_ << "subject = " << toml_string(subject) << "\n";
    for (std::string_view p : params) out_ << p << "\n";
  }

  [[nodiscard]] std::string str() const { return out_.str(); }

 private:
  void chart(const ChartedManifold& M) {
    out_ << "coords = " << list(M.coords(), [](const std::string& c) { return toml_string(c); }) << "\n";
    out_ << "domain = " << list(M.domain(), [](const CoordinateRange& r) {
      std::string e = "[" + number(r.lo) + ", " + number(r.hi);
      if (r.kind == CoordinateKind::Periodic) e += ", \"periodic\"";
      if (r.kind == CoordinateKind::Polar) e += ", \"polar\"";
      return e + "]";
    }) << "\n";
  }

  std::ostringstream out_;
};

constexpr std::string_view kSmallSphere = R"toml(
[scenario]
name = "small-sphere-inclusion"
anchor = "inclusion S²(1/√2) ⊂ S³ is proper biharmonic: τ₂ = 0 while |τ| = 2"
seed = 1

[manifold.small_sphere]
coords = ["beta", "gamma"]
domain = [[0, "pi", "polar"], [0, "2*pi", "periodic"]]
metric = ["1/2", "0", "sin(beta)^2/2"]

[manifold.S3]
coords = ["alpha", "beta", "gamma"]
domain = [[0, "pi", "polar"], [0, "pi", "polar"], [0, "2*pi", "periodic"]]
metric = ["1", "0", "0", "sin(alpha)^2", "0", "sin(alpha)^2*sin(beta)^2"]

[map.inclusion]
from = "small_sphere"
to = "S3"
components = ["pi/4", "beta", "gamma"]

[[check]]
kind = "tension-norm"
subject = "inclusion"
expected = 2
tol = 1e-9

[[check]]
kind = "bitension"
subject = "inclusion"
tol = 1e-8

[[check]]
kind = "div-identities"
subject = "inclusion"
tol = 1e-8
)toml";

constexpr std::string_view kWarped = R"toml(
[scenario]
name = "warped-product-projection"
anchor = "warped product with ln f affine: τ(π) = n grad(ln f)∘π and τ₂(π) = 0"
seed = 1

# dt^2 + f^2 (dx^2 + dy^2) with f = exp(c t), c = 0.7
[manifold.total]
coords = ["t", "x", "y"]
domain = [[-1, 1], [-1, 1], [-1, 1]]
metric = ["1", "0", "0", "exp(1.4*t)", "0", "exp(1.4*t)"]

[manifold.base]
coords = ["s"]
domain = [[-2, 2]]
metric = ["1"]

[map.projection]
from = "total"
to = "base"
components = ["t"]

[[check]]
kind = "tension-norm"
subject = "projection"
expected = 1.4
tol = 1e-10

[[check]]
kind = "bitension"
subject = "projection"
tol = 1e-8

[[check]]
kind = "div-identities"
subject = "projection"

# grad(ln f) = c d/ds on the base
[[check]]
name = "killing:grad-ln-f"
kind = "killing"
subject = "base"
field = ["0.7"]
tol = 1e-12

# the same field lifted to the total space is only conformal there
[[check]]
name = "killing:lifted-grad-ln-f"
kind = "killing"
subject = "total"
field = ["0.7", "0", "0"]
expect = "fail"

[[check]]
name = "killing:translation-with-dilation"
kind = "killing"
subject = "total"
field = ["1", "-0.7*x", "-0.7*y"]
tol = 1e-12
)toml";

constexpr std::string_view kCubic = R"toml(
[scenario]
name = "cubic-curve-s2"
anchor = "cubic curve γ(t) = t³a: S₂ = 0 although τ ≠ 0"
seed = 1

[manifold.interval]
coords = ["t"]
domain = [[0.5, 2]]
metric = ["1"]

[map.gamma]
from = "interval"
to = "R2"
components = ["t^3", "0"]

[[check]]
kind = "s2-norm"
subject = "gamma"
tol = 1e-9

[[check]]
name = "tension-at-1"
kind = "tension-norm"
subject = "gamma"
points = [[1.0]]
expected = 6
tol = 1e-10

[[check]]
kind = "div-identities"
subject = "gamma"
)toml";

constexpr std::string_view kKilling = R"toml(
[scenario]
name = "killing-fields"
anchor = "Killing fields: L_ξ g = 0"
seed = 1

[manifold.plane]
coords = ["x", "y"]
domain = [[-1, 1], [-1, 1]]
metric = ["1", "0", "1"]

[manifold.sphere]
coords = ["theta", "phi"]
domain = [[0, "pi", "polar"], [0, "2*pi", "periodic"]]
metric = ["1", "0", "sin(theta)^2"]

[[check]]
name = "killing:plane-rotation"
kind = "killing"
subject = "plane"
field = ["-y", "x"]

[[check]]
name = "killing:plane-dilation"
kind = "killing"
subject = "plane"
field = ["x", "y"]
expect = "fail"

[[check]]
name = "killing:sphere-axial-rotation"
kind = "killing"
subject = "sphere"
field = ["0", "1"]

[[check]]
name = "killing:sphere-tilted-rotation"
kind = "killing"
subject = "sphere"
field = ["-sin(phi)", "-cos(phi)*cos(theta)/sin(theta)"]
tol = 1e-11

[[check]]
name = "killing:sphere-gradient-field"
kind = "killing"
subject = "sphere"
field = ["sin(theta)", "0"]
expect = "fail"
)toml";

constexpr std::string_view kCliffordWillmore = R"toml(
[scenario]
name = "clifford-willmore"
anchor = "Clifford torus lies minimally in S³(1): Willmore gradient 0 and ∫|H|² v_g = 2π²"
seed = 1

[immersion.clifford]
coords = ["u", "v"]
domain = [[0, "2*pi", "periodic"], [0, "2*pi", "periodic"]]
embedding = ["cos(u)/sqrt(2)", "sin(u)/sqrt(2)", "cos(v)/sqrt(2)", "sin(v)/sqrt(2)"]
metric = ["1/2", "0", "1/2"]

[[check]]
name = "willmore-energy"
kind = "integral"
subject = "clifford"
integrand = "mean-curvature-squared"
expected = "2*pi^2"
tol = 1e-8

[[check]]
kind = "willmore-gradient"
subject = "clifford"
tol = 1e-10

[[check]]
kind = "pseudo-umbilic"
subject = "clifford"
tol = 1e-10

[[check]]
kind = "ruh-vilms"
subject = "clifford"
tol = 1e-9

[[check]]
kind = "mean-curvature"
subject = "clifford"
expected = 1

[[check]]
kind = "scalar-curvature"
subject = "clifford"

[[check]]
kind = "equivalence-chain"
subject = "clifford"

[[check]]
kind = "omega"
subject = "clifford"
random_fields = 5

[[check]]
kind = "weiner"
subject = "clifford"
random_fields = 20
)toml";

std::string sphere_family() {
  Writer w("sphere-family-s2-lambda", "S^m(R) ⊂ R^(m+1): S₂ = λg with λ = m(4−m)/(2R²), zero for m = 4");
  for (std::size_t m : {2u, 3u, 4u}) {
    for (double R : {1.0, 2.0}) {
      const std::string key = "S" + std::to_string(m) + "_R" + std::to_string(static_cast<int>(R));
      w.immersion(key, corpus::sphere(m, R));
      const double lambda = static_cast<double>(m * (4 - m)) / (2.0 * R * R);
      const std::string l = "lambda = " + number(lambda);
      if (m == 2) {
        w.check("s2-lambda", key, {l, "half_tau = true"});
      } else {
        w.check("s2-lambda", key, {l});
      }
    }
  }
  return w.str();
}

std::string homothety_law() {
  Writer w("homothety-law", "homothetic source metric t·g: S̃₂ = (1/t)S₂");
  w.immersion("sphere", corpus::sphere(2, 1.0));
  w.immersion("sphere3", corpus::sphere(3, 1.0));
  w.map("cubic", corpus::cubic_curve());
  w.map("poly", corpus::random_polynomial_map(7));
  w.check("homothety", "sphere", {"factors = [0.5, 2.0, 4.0]", "tol = 1e-10"});
  w.check("homothety", "sphere3", {"factors = [0.5, 2.0, 4.0]", "points = 20", "tol = 1e-10"});
  w.check("homothety", "cubic", {"factors = [9.0]"});
  w.check("homothety", "poly", {"factors = [0.5, 2.0, 4.0]", "points = 20"});
  return w.str();
}

std::string conformal_law() {
  Writer w("conformal-surface-law", "surface with τ normal under g̃ = e^(2ρ)g: S̃₂ = e^(−2ρ)S₂");
  w.immersion("sphere", corpus::sphere(2, 1.0));
  w.map("square", corpus::holomorphic_square());
  w.check("conformal", "sphere", {"name = \"conformal:rho-0.3cos\"", "rho = \"0.3*cos(theta)\"", "tol = 1e-8"});
  w.check("conformal", "sphere", {"name = \"conformal:rho-zero\"", "rho = \"0\"", "tol = 0"});
  w.check("conformal", "sphere", {"name = \"conformal:rho-constant\"", "rho = \"0.25\""});
  w.check("homothety", "sphere", {"name = \"homothety:exp(0.5)\"", "factors = [1.6487212707001282]"});
  w.check("s-norm", "square", {"name = \"conformal-map:S-vanishes\""});
  return w.str();
}

void corpus_immersions(Writer& w, bool all) {
  w.immersion("sphere", corpus::sphere(2, 1.0));
  w.immersion("clifford", corpus::clifford_torus());
  w.immersion("cylinder", corpus::cylinder());
  w.immersion("graph", corpus::random_graph_surface(11));
  if (all) {
    w.immersion("sphere_R2", corpus::sphere(2, 2.0));
    w.immersion("sphere3", corpus::sphere(3, 1.0));
    w.immersion("sphere4", corpus::sphere(4, 1.0));
    w.immersion("torus", corpus::torus_of_revolution(2.0, 1.0));
    w.immersion("paraboloid", corpus::paraboloid());
  }
}

std::string gauss_oracle() {
  Writer w("gauss-oracle-corpus", "Gauss map pullback G*g_can = m⟨H,B⟩ − ricci against the Plücker embedding");
  corpus_immersions(w, false);
  for (const char* s : {"sphere", "clifford", "cylinder", "graph"}) w.check("gauss-oracle", s, {"tol = 1e-7"});
  return w.str();
}

std::string gauss_divergence() {
  Writer w("gauss-divergence-relation", "Div S^G + ½Div S₂ − ¼d(|τ|²) = 0; constant |H| gives Div S₂ = Div S^G = 0");
  corpus_immersions(w, true);
  for (const char* s : {"sphere", "clifford", "cylinder", "graph", "sphere_R2", "sphere3", "sphere4", "torus",
                        "paraboloid"}) {
    w.check("gauss-divergence", s, {"tol = 1e-7"});
  }
  for (const char* s : {"sphere", "clifford", "cylinder", "sphere3"}) w.check("cmc-divergence", s, {"tol = 1e-8"});
  for (const char* s : {"sphere3", "sphere4"}) w.check("scalar-curvature", s);
  return w.str();
}

std::string sphere_willmore() {
  Writer w("sphere-willmore", "round spheres: pseudo-umbilical with parallel H, so −4|H|²H + 2⟨H.B,B⟩ = 0");
  w.immersion("sphere", corpus::sphere(2, 1.0));
  w.immersion("sphere_R2", corpus::sphere(2, 2.0));
  for (const char* s : {"sphere", "sphere_R2"}) {
    w.check("willmore-gradient", s, {"tol = 1e-10"});
    w.check("pseudo-umbilic", s, {"tol = 1e-10"});
    w.check("ruh-vilms", s, {"tol = 1e-9"});
    w.check("equivalence-chain", s, {"tol = 1e-8"});
    w.check("weiner", s, {"random_fields = 20"});
  }
  w.check("scalar-curvature", "sphere");
  w.check("scalar-curvature", "sphere_R2");
  w.check("mean-curvature", "sphere", {"expected = 1"});
  w.check("mean-curvature", "sphere_R2", {"expected = 0.5"});
  w.check("omega", "sphere",
          {"name = \"omega:unit-normal\"", "field = [\"sin(theta)*cos(phi)\", \"sin(theta)*sin(phi)\", \"cos(theta)\"]"});
  w.check("omega", "sphere_R2", {"random_fields = 5"});
  return w.str();
}

std::string cylinder_witness() {
  Writer w("cylinder-negative-witness",
           "cylinder: parallel H but not pseudo-umbilical, so S^G ≠ 0 and −4|H|²H + 2⟨H.B,B⟩ ≠ 0");
  w.immersion("cylinder", corpus::cylinder());
  w.immersion("paraboloid", corpus::paraboloid());
  w.check("equivalence-chain", "cylinder", {"expect = \"fail\"", "tol = 1e-3"});
  w.check("willmore-gradient", "cylinder", {"expect = \"fail\"", "tol = 1e-2"});
  w.check("pseudo-umbilic", "cylinder", {"expect = \"fail\""});
  w.check("ruh-vilms", "cylinder", {"tol = 1e-9"});
  w.check("mean-curvature", "cylinder", {"expected = 0.5"});
  w.check("weiner", "cylinder", {"name = \"weiner:unit-normal\"", "field = [\"cos(u)\", \"sin(u)\", \"0\"]"});
  w.check("omega", "cylinder", {"name = \"omega:unit-normal\"", "field = [\"cos(u)\", \"sin(u)\", \"0\"]"});
  w.check("ruh-vilms", "paraboloid", {"name = \"ruh-vilms:paraboloid-point\"", "expect = \"fail\"", "points = [[0.3, 0.2]]"});
  w.check("equivalence-chain", "paraboloid", {"expect = \"fail\"", "points = [[0.3, 0.2], [-0.5, 0.4], [0.7, -0.6]]"});
  return w.str();
}

std::string gauss_bonnet() {
  Writer w("gauss-bonnet-integrals", "∫e(G) v_g = 2∫|H|² v_g − 2πχ(M)");
  w.immersion("sphere", corpus::sphere(2, 1.0));
  w.immersion("sphere_R2", corpus::sphere(2, 2.0));
  w.immersion("torus", corpus::torus_of_revolution(2.0, 1.0));
  w.immersion("clifford", corpus::clifford_torus());
  for (const char* s : {"sphere", "torus", "clifford"}) w.check("gauss-bonnet", s, {"tol = 1e-5"});
  w.check("euler-characteristic", "sphere", {"expected = 2"});
  w.check("euler-characteristic", "torus", {"expected = 0"});
  w.check("euler-characteristic", "clifford", {"expected = 0"});
  w.check("integral", "sphere", {"name = \"area:unit-sphere\"", "integrand = \"one\"", "expected = \"4*pi\""});
  w.check("integral", "sphere_R2",
          {"name = \"total-curvature:sphere-R2\"", "integrand = \"gaussian-curvature\"", "expected = \"4*pi\""});
  return w.str();
}

std::string random_div() {
  Writer w("random-div-identities", "Div S = −⟨τ,dφ⟩ and Div S₂ = −⟨τ₂,dφ⟩ on random polynomial maps", 2024);
  w.check("random-div-identities", "", {"count = 50", "points = 200", "tol = 1e-8"});
  return w.str();
}

std::string corpus_div() {
  Writer w("corpus-div-identities", "Div S = −⟨τ,dφ⟩ and Div S₂ = −⟨τ₂,dφ⟩ on every corpus map and immersion");
  w.map("small_sphere_inclusion", corpus::small_sphere_inclusion());
  w.map("warped_projection", corpus::warped_projection(0.7));
  w.map("cubic_curve", corpus::cubic_curve());
  w.map("circle", corpus::circle(2.0));
  w.map("holomorphic_square", corpus::holomorphic_square());
  w.map("sphere_identity", corpus::identity(corpus::round_sphere(1.0)));
  w.map("perturbed_identity", corpus::identity(corpus::perturbed_metric(5)));
  w.map("constant", corpus::constant(corpus::round_sphere(1.0), corpus::round_three_sphere(), {1.0, 1.0, 1.0}));
  corpus_immersions(w, true);
  for (const char* s : {"small_sphere_inclusion", "warped_projection", "cubic_curve", "circle", "holomorphic_square",
                        "sphere_identity", "perturbed_identity", "constant", "sphere", "clifford", "cylinder", "graph",
                        "sphere_R2", "sphere3", "torus", "paraboloid", "sphere4"}) {
    w.check("div-identities", s, {"tol = 1e-8"});
  }
  return w.str();
}

std::string map_witnesses() {
  Writer w("map-witnesses", "harmonic ⇒ biharmonic; arc-length circle of radius a has |τ₂| = 1/a³");
  w.map("circle", corpus::circle(2.0));
  w.map("sphere_identity", corpus::identity(corpus::round_sphere(1.0)));
  w.map("equator", SmoothMap("equator", corpus::round_sphere(1.0), corpus::round_three_sphere(),
                             {Expr(std::numbers::pi / 2), Expr::variable("theta"), Expr::variable("phi")}));
  w.check("tension-norm", "circle", {"expected = 0.5"});
  w.check("bitension", "circle", {"expected = 0.125", "tol = 1e-10"});
  w.check("tension-norm", "sphere_identity", {"expected = 0", "tol = 1e-10"});
  w.check("bitension", "sphere_identity", {"tol = 1e-7"});
  w.check("tension-norm", "equator", {"expected = 0", "tol = 1e-10"});
  w.check("bitension", "equator", {"tol = 1e-7"});
  w.check("s2-norm", "equator", {"tol = 1e-9"});
  return w.str();
}

std::vector<BuiltinScenario> build() {
  const std::vector<std::string> texts{
      std::string(kSmallSphere), std::string(kWarped), std::string(kCubic), sphere_family(),   homothety_law(),
      conformal_law(),           gauss_oracle(),       gauss_divergence(),  sphere_willmore(), std::string(kCliffordWillmore),
      cylinder_witness(),        gauss_bonnet(),       std::string(kKilling), random_div(),   corpus_div(),
      map_witnesses(),
  };
  std::vector<BuiltinScenario> out;
  for (const std::string& t : texts) {
    const nlohmann::json head = parse_toml(t).at("scenario");
    out.push_back({head.at("name").get<std::string>(), head.at("anchor").get<std::string>(), t});
  }
  return out;
}

}  // namespace

const std::vector<BuiltinScenario>& builtin_scenarios() {
  static const std::vector<BuiltinScenario> all = build();
  return all;
}

const BuiltinScenario* find_builtin(std::string_view name) {
  for (const BuiltinScenario& b : builtin_scenarios()) {
    if (b.name == name) return &b;
  }
  return nullptr;
}

}  // namespace bitensor
