#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "hyperfovea/box.hpp"
#include "hyperfovea/geometry.hpp"
#include "hyperfovea/image.hpp"
#include "hyperfovea/warp.hpp"

using namespace hyperfovea;

namespace {

const FoveationParams kParams{{0.0, 0.0}, 1.0, 2.0, 2.0};

std::vector<EuclideanBox> random_boxes(std::size_t n) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> c(-1.0, 1.0), s(0.01, 0.3);
  std::vector<EuclideanBox> boxes(n);
  for (auto& b : boxes) b = {{c(rng), c(rng)}, s(rng), s(rng)};
  return boxes;
}

void BM_ToRiemannian(benchmark::State& state) {
  const auto boxes = random_boxes(400);
  for (auto _ : state) {
    for (const auto& b : boxes) benchmark::DoNotOptimize(to_riemannian(b, kParams));
  }
  state.SetItemsProcessed(state.iterations() * 400);
}
BENCHMARK(BM_ToRiemannian);

void BM_ToEuclidean(benchmark::State& state) {
  const double tol = state.range(0) == 0 ? 1e-6 : 1e-10;
  std::vector<RiemannianBox> warped;
  for (const auto& b : random_boxes(400)) warped.push_back(to_riemannian(b, kParams));
  for (auto _ : state) {
    for (const auto& r : warped) benchmark::DoNotOptimize(to_euclidean(r, kParams, tol));
  }
  state.SetItemsProcessed(state.iterations() * 400);
}
BENCHMARK(BM_ToEuclidean)->Arg(0)->Arg(1);

void BM_InverseNewton(benchmark::State& state) {
  const auto pts = forward_map_batch(
      [] {
        std::vector<NormPoint> v;
        for (const auto& b : random_boxes(1024)) v.push_back(b.center);
        return v;
      }(),
      kParams);
  for (auto _ : state) {
    for (const auto& y : pts) benchmark::DoNotOptimize(inverse_newton(y, kParams, 1e-6, 25));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(pts.size()));
}
BENCHMARK(BM_InverseNewton);

void BM_InverseFixedPoint(benchmark::State& state) {
  std::vector<NormPoint> pts;
  for (const auto& b : random_boxes(1024)) pts.push_back(forward_map(b.center, kParams));
  const double eta = default_fixed_point_step(kParams);
  for (auto _ : state) {
    for (const auto& y : pts)
      benchmark::DoNotOptimize(inverse_fixed_point(y, kParams, eta, 1e-6, 1000));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(pts.size()));
}
BENCHMARK(BM_InverseFixedPoint);

void BM_BuildInverseGrid(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(build_inverse_grid(n, n, kParams));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}
BENCHMARK(BM_BuildInverseGrid)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

void BM_WarpImage(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const ImageBuffer chart = make_test_chart(n, n);
  const WarpGrid grid = build_inverse_grid(n, n, kParams);
  for (auto _ : state) benchmark::DoNotOptimize(warp_image(chart, grid));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}
BENCHMARK(BM_WarpImage)->Arg(256)->Arg(1024)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
