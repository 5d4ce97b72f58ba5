#include <benchmark/benchmark.h>

#include "vita/feasibility.hpp"
#include "vita/kdtree.hpp"
#include "vita/mesh.hpp"
#include "vita/refiner.hpp"
#include "vita/synth.hpp"
#include "vita/tracking.hpp"

namespace {

vita::BenchSize size_of(const benchmark::State& state) {
  return {static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)),
          static_cast<std::size_t>(state.range(2))};
}

void BM_CheckAll(benchmark::State& state) {
  const vita::GeneratedScene g = vita::bench_scene(size_of(state), 1);
  const vita::Pose pose = vita::perturb_pose(g.ground_truth, {}, 2);
  for (auto _ : state) benchmark::DoNotOptimize(vita::check_all(g.scene, pose, {}));
}
BENCHMARK(BM_CheckAll)->Args({2048, 1024, 30})->Args({8192, 4096, 30})->Unit(benchmark::kMillisecond);

void BM_Refine(benchmark::State& state) {
  const vita::GeneratedScene g = vita::bench_scene({2048, 1024, 30}, 1);
  const vita::Pose pose = vita::perturb_pose(g.ground_truth, {}, 2);
  vita::RefinementConfig cfg;
  cfg.iterations = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(vita::refine(g.scene, pose, cfg));
}
BENCHMARK(BM_Refine)->Arg(10)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_KdTreeBuild(benchmark::State& state) {
  const auto cloud = vita::sample_mesh_surface(vita::make_sphere(0.05), static_cast<std::size_t>(state.range(0)), 3);
  for (auto _ : state) benchmark::DoNotOptimize(vita::KdTree(cloud.points));
}
BENCHMARK(BM_KdTreeBuild)->Arg(2048)->Arg(16384);

void BM_KdTreeNearest(benchmark::State& state) {
  const auto cloud = vita::sample_mesh_surface(vita::make_sphere(0.05), static_cast<std::size_t>(state.range(0)), 3);
  const vita::KdTree tree(cloud.points);
  const auto queries = vita::sample_mesh_surface(vita::make_sphere(0.06), 1024, 4);
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(tree.nearest(queries.points[i++ % queries.size()]));
}
BENCHMARK(BM_KdTreeNearest)->Arg(2048)->Arg(16384);

}  // namespace

BENCHMARK_MAIN();
