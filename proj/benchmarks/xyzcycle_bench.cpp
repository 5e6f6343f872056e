// Copyright (c) 2026 The xyzcycle Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include <vector>

#include "xyzcycle/cyclenet.hpp"
#include "xyzcycle/data.hpp"
#include "xyzcycle/metrics.hpp"
#include "xyzcycle/nn/layers.hpp"
#include "xyzcycle/polymap.hpp"
#include "xyzcycle/random.hpp"
#include "xyzcycle/tasks.hpp"

using namespace xyzcycle;

namespace {

PlanarImage noise_image(int n, std::uint64_t seed) {
  Rng rng(seed);
  PlanarImage img(n, n);
  for (double& v : img.samples()) v = rng.uniform();
  return img;
}

void BM_Conv3x3Forward(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  nn::Conv3x3<float> conv(32, 32);
  Rng rng(1);
  conv.initialize(rng);
  nn::Tensor<float> x({32, n, n});
  for (auto& v : x.values()) v = static_cast<float>(rng.uniform());
  for (auto _ : state) benchmark::DoNotOptimize(conv.infer(x));
  state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_Conv3x3Forward)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_Conv3x3TrainStep(benchmark::State& state) {
  nn::Conv3x3<float> conv(32, 32);
  Rng rng(2);
  conv.initialize(rng);
  nn::Tensor<float> x({32, 64, 64});
  for (auto& v : x.values()) v = static_cast<float>(rng.uniform());
  for (auto _ : state) {
    auto y = conv.forward(x, true);
    benchmark::DoNotOptimize(conv.backward(y));
  }
}
BENCHMARK(BM_Conv3x3TrainStep)->Unit(benchmark::kMillisecond);

void BM_CycleInference(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  cycle::Model net;
  net.initialize(3);
  const PlanarImage srgb = noise_image(n, 4);
  for (auto _ : state) {
    const auto d = cycle::unprocess(net, srgb);
    benchmark::DoNotOptimize(cycle::render(net, d.xyz));
  }
}
BENCHMARK(BM_CycleInference)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_ApplyPoly(benchmark::State& state) {
  const PlanarImage img = noise_image(256, 5);
  const poly::PolyMatrix m = poly::PolyMatrix::identity();
  for (auto _ : state) benchmark::DoNotOptimize(poly::apply_poly(m, img));
  state.SetItemsProcessed(state.iterations() * 256 * 256);
}
BENCHMARK(BM_ApplyPoly);

void BM_Ssim(benchmark::State& state) {
  const PlanarImage a = noise_image(256, 6), b = noise_image(256, 7);
  for (auto _ : state) benchmark::DoNotOptimize(metrics::ssim(a, b));
}
BENCHMARK(BM_Ssim)->Unit(benchmark::kMillisecond);

void BM_ExposureFusion(benchmark::State& state) {
  const PlanarImage scene = clamp(data::generate_scene(128, 128, 8, 0.3), 0.0, 1.0);
  std::vector<PlanarImage> stack;
  for (const auto& s : tasks::multi_gain(scene, tasks::kDefaultGains)) stack.push_back(clamp(s, 0.0, 1.0));
  for (auto _ : state) benchmark::DoNotOptimize(tasks::exposure_fusion(stack));
}
BENCHMARK(BM_ExposureFusion)->Unit(benchmark::kMillisecond);

void BM_WienerDeconvolve(benchmark::State& state) {
  const PlanarImage img = noise_image(128, 9);
  const tasks::Kernel k = tasks::motion_kernel(9, 30.0);
  for (auto _ : state) benchmark::DoNotOptimize(tasks::wiener_deconvolve(img, k, 1e3));
}
BENCHMARK(BM_WienerDeconvolve)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
