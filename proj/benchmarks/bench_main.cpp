#include <benchmark/benchmark.h>

#include <random>

#include "fixtures.hpp"
#include "metric_fixtures.hpp"
#include "projmetric/kernel.hpp"
#include "projmetric/metrisability.hpp"
#include "projmetric/projective.hpp"

using namespace projmetric;
using namespace fixtures;

namespace {

void BM_DecomposeRandom(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937 rng(42);
  Chart ch = coords_chart(n);
  Connection conn = random_connection(rng, ch, n == 3 ? 2 : 1);
  for (auto _ : state) benchmark::DoNotOptimize(decompose(conn));
}
BENCHMARK(BM_DecomposeRandom)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_ChecklistExample1(benchmark::State& state) {
  Chart ch = xyz_chart({"a", "b", "c"});
  Connection conn = example1(ch);
  ChecklistOptions o;
  o.backend = Backend::Symbolic;
  for (auto _ : state) benchmark::DoNotOptimize(run_checklist(conn, o));
}
BENCHMARK(BM_ChecklistExample1)->Unit(benchmark::kMillisecond);

void BM_ChecklistExample2(benchmark::State& state) {
  Chart ch = xyz_chart({"h"});
  Connection conn = example2(ch);
  ChecklistOptions o;
  o.backend = Backend::Symbolic;
  for (auto _ : state) benchmark::DoNotOptimize(run_checklist(conn, o));
}
BENCHMARK(BM_ChecklistExample2)->Unit(benchmark::kMillisecond);

void BM_ChecklistNumericRandomMetric(benchmark::State& state) {
  std::mt19937 rng(5);
  Chart ch = coords_chart(3);
  Connection conn = levi_civita(random_metric(rng, ch, 3));
  ChecklistOptions o;
  o.backend = Backend::Numeric;
  for (auto _ : state) benchmark::DoNotOptimize(run_checklist(conn, o));
}
BENCHMARK(BM_ChecklistNumericRandomMetric)->Unit(benchmark::kMillisecond);

void BM_NumericKernel(benchmark::State& state) {
  const auto cols = static_cast<std::size_t>(state.range(0));
  std::mt19937 rng(1);
  std::normal_distribution<double> nd;
  std::vector<std::vector<double>> rows(3 * cols, std::vector<double>(cols));
  for (auto& r : rows)
    for (auto& v : r) v = nd(rng);
  for (auto& r : rows) r.back() = r.front();  // force a kernel direction
  for (auto& r : rows) r.front() = 0;
  for (auto _ : state) benchmark::DoNotOptimize(numeric_kernel(rows, cols, 1e-9));
}
BENCHMARK(BM_NumericKernel)->Arg(10)->Arg(15)->Arg(21);

void BM_Geodesic(benchmark::State& state) {
  std::mt19937 rng(8);
  Chart ch = coords_chart(3);
  Connection conn = random_connection(rng, ch, 1);
  NumericEnv env;
  std::vector<double> x0{0.1, 0.2, 0.3}, v0{1, 0.5, -0.2};
  for (auto _ : state) benchmark::DoNotOptimize(integrate_geodesic(conn, env, x0, v0, 0.4));
}
BENCHMARK(BM_Geodesic)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
