#include <benchmark/benchmark.h>

#include <cmath>

#include "lpnp/lpnp.hpp"

namespace {

using namespace lpnp;

Image scene(int n) {
  Image img(n, n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      const double blob = std::exp(-((r - n / 3.0) * (r - n / 3.0) + (c - n / 2.0) * (c - n / 2.0)) /
                                   (0.02 * n * n));
      img(r, c) = 0.2 + 0.5 * blob + 0.2 * ((r / 8 + c / 8) % 2) + 0.05 * std::sin(0.7 * r * c);
    }
  }
  return img;
}

// Range: image side, patch side. Window radius fixed at 10.
void BM_DsgNlmFast(benchmark::State& state) {
  const Image img = scene(static_cast<int>(state.range(0)));
  const PatchParams p{static_cast<int>(state.range(1)), 10, 0.1};
  for (auto _ : state) benchmark::DoNotOptimize(dsg_nlm_denoise(img, img, p));
}
BENCHMARK(BM_DsgNlmFast)->ArgsProduct({{64, 128}, {5, 11, 17}})->Unit(benchmark::kMillisecond);

void BM_DsgNlmBruteForce(benchmark::State& state) {
  const Image img = scene(static_cast<int>(state.range(0)));
  const PatchParams p{static_cast<int>(state.range(1)), 10, 0.1};
  for (auto _ : state) benchmark::DoNotOptimize(dsg_nlm_denoise_brute_force(img, img, p));
}
BENCHMARK(BM_DsgNlmBruteForce)->ArgsProduct({{64}, {5, 11, 17}})->Unit(benchmark::kMillisecond);

void BM_FrozenGuideApply(benchmark::State& state) {
  const Image img = scene(static_cast<int>(state.range(0)));
  const FrozenGuide frozen(img, PatchParams{5, static_cast<int>(state.range(1)), 0.1});
  for (auto _ : state) benchmark::DoNotOptimize(frozen.apply(img));
}
BENCHMARK(BM_FrozenGuideApply)->ArgsProduct({{128, 256}, {5, 10}})->Unit(benchmark::kMillisecond);

void BM_PatchDistanceMap(benchmark::State& state) {
  const Image img = scene(256);
  const PatchParams p{static_cast<int>(state.range(0)), 10, 0.1};
  for (auto _ : state) benchmark::DoNotOptimize(patch_distance_map(img, Offset{3, -2}, p));
}
BENCHMARK(BM_PatchDistanceMap)->Arg(5)->Arg(17)->Arg(29)->Unit(benchmark::kMicrosecond);

void BM_SuperResGradient(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const SuperResOp op{gaussian_kernel(1.5, 5), 2, Boundary::Symmetric};
  const Image x = scene(n);
  const Image y = sr_apply(op, x);
  for (auto _ : state) benchmark::DoNotOptimize(sr_gradient(op, x, y));
}
BENCHMARK(BM_SuperResGradient)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

// Ten linearized iterations with the frozen denoiser on a 128x128 problem.
void BM_LinearizedIterations(benchmark::State& state) {
  const Image truth = scene(128);
  const SuperResOp op{gaussian_kernel(1.5, 5), 2, Boundary::Periodic};
  const ProblemSpec prob = make_superres_problem(op, sr_apply(op, truth), truth);
  SolverConfig cfg;
  cfg.alpha = default_superres_alpha(op, 128, 128);
  cfg.rho = 0.1;
  cfg.lambda = 1e-5;
  cfg.max_iters = 10;
  cfg.freeze_at = 1;
  for (auto _ : state) benchmark::DoNotOptimize(linearized_pnp_admm(prob, cfg));
}
BENCHMARK(BM_LinearizedIterations)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
