#include <benchmark/benchmark.h>

#include "ncshape/kernels.hpp"
#include "ncshape/representations.hpp"
#include "ncshape/shapes.hpp"

using namespace ncshape;

namespace {

DiracFunctional sphere_nc(int res) { return normal_cycle_of_mesh(make_sphere(res)); }

void BM_NormalCycleBuild(benchmark::State& state) {
  const TriangleMesh mesh = make_sphere(static_cast<int>(state.range(0)));
  const EdgeTable edges = build_edge_table(mesh);
  const BoundaryInfo boundary = boundary_vertices(mesh, edges);
  for (auto _ : state) {
    benchmark::DoNotOptimize(normal_cycle_of_mesh(mesh, edges, boundary));
  }
  state.SetComplexityN(edges.edge_count());
}
BENCHMARK(BM_NormalCycleBuild)->Arg(4)->Arg(8)->Arg(16)->Complexity();

void BM_DualInner(benchmark::State& state) {
  const DiracFunctional mu = sphere_nc(static_cast<int>(state.range(0)));
  const GaussianKernel kernel{0.5};
  for (auto _ : state) {
    benchmark::DoNotOptimize(dual_inner(kernel, mu, mu));
  }
  state.SetComplexityN(mu.rows());
}
BENCHMARK(BM_DualInner)->Arg(3)->Arg(6)->Arg(12)->Complexity();

void BM_TheoremSurfaceInner(benchmark::State& state) {
  const TriangleMesh mesh = make_sphere(static_cast<int>(state.range(0)));
  const GaussianKernel kernel{0.5};
  for (auto _ : state) {
    benchmark::DoNotOptimize(nc_inner_theorem_surface(kernel, mesh, mesh));
  }
}
BENCHMARK(BM_TheoremSurfaceInner)->Arg(3)->Arg(6);

} // namespace
