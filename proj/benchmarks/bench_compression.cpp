#include <benchmark/benchmark.h>

#include "ncshape/compression.hpp"
#include "ncshape/representations.hpp"
#include "ncshape/rls.hpp"
#include "ncshape/shapes.hpp"

using namespace ncshape;

namespace {

void BM_RecursiveRlsSample(benchmark::State& state) {
  const DiracFunctional mu = normal_cycle_of_mesh(make_sphere(static_cast<int>(state.range(0))));
  const GaussianKernel kernel{0.6};
  RlsConfig cfg;
  cfg.target_m = mu.rows() / 10;
  cfg.lambda = auto_lambda(kernel, mu.points, cfg.target_m);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    cfg.seed = seed++;
    benchmark::DoNotOptimize(recursive_rls_sample(kernel, mu.points, cfg));
  }
  state.SetComplexityN(mu.rows());
}
BENCHMARK(BM_RecursiveRlsSample)->Arg(5)->Arg(8)->Arg(12)->Complexity();

void BM_ExactRlsScores(benchmark::State& state) {
  const DiracFunctional mu = normal_cycle_of_mesh(make_sphere(static_cast<int>(state.range(0))));
  const GaussianKernel kernel{0.6};
  const double lambda = auto_lambda(kernel, mu.points, mu.rows() / 10);
  for (auto _ : state) {
    benchmark::DoNotOptimize(exact_rls_scores(kernel, mu.points, lambda));
  }
  state.SetComplexityN(mu.rows());
}
BENCHMARK(BM_ExactRlsScores)->Arg(4)->Arg(6)->Complexity();

void BM_CompressEndToEnd(benchmark::State& state) {
  const DiracFunctional mu = normal_cycle_of_mesh(make_sphere(static_cast<int>(state.range(0))));
  const GaussianKernel kernel{0.6};
  const double norm_sq = dual_inner(kernel, mu, mu);
  CompressConfig cfg;
  cfg.target_m = mu.rows() / 10;
  cfg.with_trace_bound = false;
  std::uint64_t seed = 0;
  for (auto _ : state) {
    cfg.seed = seed++;
    benchmark::DoNotOptimize(compress(kernel, mu, cfg, norm_sq));
  }
}
BENCHMARK(BM_CompressEndToEnd)->Arg(5)->Arg(10);

} // namespace
