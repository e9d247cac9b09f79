// Copyright 2026 The WaveTrunk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstddef>

#include "benchmark/benchmark.h"
#include "wavetrunk/ndgrad/init.h"
#include "wavetrunk/ndgrad/losses.h"
#include "wavetrunk/ndgrad/ops.h"
#include "wavetrunk/ndgrad/tape.h"
#include "wavetrunk/trunk.h"

namespace wavetrunk {
namespace {

using ndgrad::Array;
using ndgrad::Shape;

Array<float> random_input(std::size_t batch, std::size_t channels,
                          std::size_t len, Rng& rng) {
  Array<float> x(Shape{batch, channels, len});
  for (float& v : x.data()) v = static_cast<float>(2.0 * uniform01(rng) - 1.0);
  return x;
}

void BM_CausalConv(benchmark::State& state) {
  const auto channels = static_cast<std::size_t>(state.range(0));
  const std::size_t len = 32000;
  Rng rng(1);
  Array<float> x = random_input(1, channels, len, rng);
  Array<float> w =
      ndgrad::he_uniform_array<float>(Shape{channels, channels, 2}, channels * 2, rng);
  Array<float> b(Shape{channels}, true);
  for (auto _ : state) {
    benchmark::DoNotOptimize(ndgrad::causal_dilated_conv1d(x, w, b, 4));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(len));
}
BENCHMARK(BM_CausalConv)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_CausalConvBackward(benchmark::State& state) {
  const auto channels = static_cast<std::size_t>(state.range(0));
  const std::size_t len = 32000;
  Rng rng(1);
  Array<float> x = random_input(1, channels, len, rng);
  x.set_requires_grad(true);
  Array<float> w =
      ndgrad::he_uniform_array<float>(Shape{channels, channels, 2}, channels * 2, rng);
  Array<float> b(Shape{channels}, true);
  Array<float> zeros(Shape{1, channels, len});
  for (auto _ : state) {
    ndgrad::Tape<float> tape;
    ndgrad::TapeScope<float> scope(tape);
    Array<float> y = ndgrad::causal_dilated_conv1d(x, w, b, 4);
    tape.backward(ndgrad::mse_loss(y, zeros));
  }
}
BENCHMARK(BM_CausalConvBackward)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_TrunkForward(benchmark::State& state) {
  TrunkConfig cfg{2, 4, static_cast<std::size_t>(state.range(0))};
  Rng rng(2);
  auto params = TrunkParams<float>::init(cfg, rng);
  Array<float> x = random_input(1, 1, 32000, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(trunk_forward(x, params, cfg));
  }
}
BENCHMARK(BM_TrunkForward)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_TrunkForwardBackward(benchmark::State& state) {
  TrunkConfig cfg{2, 4, static_cast<std::size_t>(state.range(0))};
  Rng rng(3);
  auto params = TrunkParams<float>::init(cfg, rng);
  Array<float> x = random_input(1, 1, 32000, rng);
  for (auto _ : state) {
    ndgrad::Tape<float> tape;
    ndgrad::TapeScope<float> scope(tape);
    Array<float> emb = trunk_forward(x, params, cfg);
    Array<float> pooled = ndgrad::global_avg_pool_time(emb);
    Array<float> target(pooled.shape());
    tape.backward(ndgrad::mse_loss(pooled, target));
  }
}
BENCHMARK(BM_TrunkForwardBackward)->Arg(32)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace wavetrunk
BENCHMARK_MAIN();
