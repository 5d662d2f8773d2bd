#include <benchmark/benchmark.h>

#include <numbers>

#include "bitensor/corpus.hpp"
#include "bitensor/parse.hpp"
#include "bitensor/program.hpp"
#include "bitensor/quadrature.hpp"

namespace {

using namespace bitensor;

const std::vector<std::string> kUV{"u", "v"};
constexpr const char* kTorus = "(2 + cos(v))*cos(u)*exp(0.3*sin(u*v))";

void BM_Parse(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(parse(kTorus, kUV));
}
BENCHMARK(BM_Parse);

void BM_DifferentiateFourTimes(benchmark::State& state) {
  const Expr e = parse(kTorus, kUV);
  for (auto _ : state) {
    Expr d = e;
    for (int k = 0; k < 4; ++k) d = differentiate(d, k % 2 ? "v" : "u");
    benchmark::DoNotOptimize(d);
  }
}
BENCHMARK(BM_DifferentiateFourTimes);

void BM_TreeEvaluate(benchmark::State& state) {
  const Expr e = differentiate(differentiate(parse(kTorus, kUV), "u"), "v");
  const Bindings at{{"u", 0.3}, {"v", 1.1}};
  for (auto _ : state) benchmark::DoNotOptimize(evaluate(e, at));
}
BENCHMARK(BM_TreeEvaluate);

void BM_ProgramEvaluate(benchmark::State& state) {
  const Expr e = differentiate(differentiate(parse(kTorus, kUV), "u"), "v");
  const Program program(std::span(&e, 1), kUV);
  const double at[] = {0.3, 1.1};
  double out[1];
  for (auto _ : state) {
    program.evaluate(at, out);
    benchmark::DoNotOptimize(out[0]);
  }
}
BENCHMARK(BM_ProgramEvaluate);

void BM_BuildSmallSphereInclusion(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(corpus::small_sphere_inclusion());
}
BENCHMARK(BM_BuildSmallSphereInclusion)->Unit(benchmark::kMillisecond);

void BM_Bitension(benchmark::State& state) {
  const SmoothMap phi = corpus::small_sphere_inclusion();
  const double p[] = {0.9, 2.1};
  for (auto _ : state) benchmark::DoNotOptimize(phi.evaluate(p).tau2);
}
BENCHMARK(BM_Bitension);

void BM_StressTensors(benchmark::State& state) {
  const SmoothMap phi = corpus::random_polynomial_map(7);
  const StressEnergy se(phi);
  const double p[] = {0.2, -0.4};
  for (auto _ : state) benchmark::DoNotOptimize(se.evaluate(p));
}
BENCHMARK(BM_StressTensors);

void BM_SubmanifoldPoint(benchmark::State& state) {
  const Immersion torus = corpus::torus_of_revolution();
  const double p[] = {0.7, 2.3};
  for (auto _ : state) benchmark::DoNotOptimize(torus.evaluate(p));
}
BENCHMARK(BM_SubmanifoldPoint);

void BM_GaussLegendreNodes(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(gauss_legendre(n, 0.0, std::numbers::pi));
}
BENCHMARK(BM_GaussLegendreNodes)->Arg(48)->Arg(96);

void BM_AreaIntegral(benchmark::State& state) {
  const auto M = corpus::round_sphere(1.0);
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const Grid grid = make_grid(*M, std::span(&n, 1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(integrate_on(*M, grid, [](std::span<const double>) { return 1.0; }));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * grid.node_count()));
}
BENCHMARK(BM_AreaIntegral)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_EulerCharacteristicTorus(benchmark::State& state) {
  const Immersion torus = corpus::torus_of_revolution();
  for (auto _ : state) benchmark::DoNotOptimize(euler_characteristic(torus));
}
BENCHMARK(BM_EulerCharacteristicTorus)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
