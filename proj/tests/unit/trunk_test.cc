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


#include <cmath>
#include <cstring>
#include <vector>

#include "gtest/gtest.h"
#include "test_util.h"
#include "wavetrunk/ndgrad/losses.h"
#include "wavetrunk/ndgrad/ops.h"
#include "wavetrunk/trunk.h"

namespace wavetrunk {
namespace {

using ndgrad::Array;
using ndgrad::Shape;

TEST(TrunkConfigTest, DefaultsAndDilations) {
  const TrunkConfig cfg;
  EXPECT_EQ(cfg.num_blocks, 3u);
  EXPECT_EQ(cfg.layers_per_block, 6u);
  EXPECT_EQ(cfg.channels, 64u);
  const std::vector<std::size_t> want = {1, 2, 4, 8, 16, 32};
  for (std::size_t l = 1; l <= 18; ++l) EXPECT_EQ(cfg.dilation(l), want[(l - 1) % 6]);
  EXPECT_THROW(cfg.dilation(0), std::out_of_range);
  EXPECT_THROW(cfg.dilation(19), std::out_of_range);
  EXPECT_THROW((TrunkConfig{0, 6, 64}.validate()), std::invalid_argument);
}

TEST(TrunkConfigTest, ReceptiveFieldFormula) {
  EXPECT_EQ(receptive_field(TrunkConfig{}), 190u);
  EXPECT_EQ(receptive_field(TrunkConfig{1, 2, 4}), 4u);
  EXPECT_EQ(receptive_field(TrunkConfig{2, 3, 4}), 15u);
  EXPECT_EQ(receptive_field(TrunkConfig{2, 4, 32}), 31u);
  EXPECT_EQ(receptive_field_prefix(TrunkConfig{}, 1), 64u);
}

TEST(TrunkParamsTest, DefaultParameterCountAndNames) {
  Rng rng(1);
  const TrunkConfig cfg;
  const auto params = TrunkParams<float>::init(cfg, rng);
  EXPECT_EQ(params.parameter_count(), 297344u);
  const auto named = params.named_parameters();
  ASSERT_EQ(named.size(), 2u + 18u * 4u);
  EXPECT_EQ(named.front().name, "trunk.input.weight");
  EXPECT_EQ(named[2].name, "trunk.layer01.filter.weight");
  EXPECT_EQ(named.back().name, "trunk.layer18.gate.bias");
  for (const auto& p : named) EXPECT_TRUE(p.value.requires_grad()) << p.name;
}

TEST(TrunkParamsTest, HeUniformBoundsAndZeroBias) {
  Rng rng(2);
  const TrunkConfig cfg{1, 2, 16};
  const auto params = TrunkParams<double>::init(cfg, rng);
  const double bound = std::sqrt(6.0 / (16.0 * 2.0));
  for (const auto& layer : params.layers) {
    for (double w : layer.filter_weight.data()) EXPECT_LE(std::abs(w), bound);
    for (double b : layer.gate_bias.data()) EXPECT_EQ(b, 0.0);
  }
}

// Direct evaluation of the residual stack with scalar loops.
std::vector<double> reference_trunk(const std::vector<double>& x, const TrunkParams<double>& p,
                                    const TrunkConfig& cfg) {
  const std::size_t c = cfg.channels, len = x.size();
  std::vector<double> h(c * len);
  for (std::size_t ch = 0; ch < c; ++ch) {
    for (std::size_t t = 0; t < len; ++t) {
      h[ch * len + t] = p.input_weight.data()[ch] * x[t] + p.input_bias.data()[ch];
    }
  }
  for (std::size_t l = 0; l < cfg.num_layers(); ++l) {
    const std::size_t d = cfg.dilation(l + 1);
    const auto& a = p.layers[l];
    std::vector<double> next = h;
    for (std::size_t o = 0; o < c; ++o) {
      for (std::size_t t = 0; t < len; ++t) {
        double f = a.filter_bias.data()[o], g = a.gate_bias.data()[o];
        for (std::size_t i = 0; i < c; ++i) {
          const double now = h[i * len + t];
          const double past = t >= d ? h[i * len + t - d] : 0.0;
          f += a.filter_weight.data()[(o * c + i) * 2 + 0] * past +
               a.filter_weight.data()[(o * c + i) * 2 + 1] * now;
          g += a.gate_weight.data()[(o * c + i) * 2 + 0] * past +
               a.gate_weight.data()[(o * c + i) * 2 + 1] * now;
        }
        next[o * len + t] += std::tanh(f) / (1.0 + std::exp(-g));
      }
    }
    h = std::move(next);
  }
  return h;
}

TEST(TrunkForwardTest, MatchesScalarReference) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng(derive_seed(3, {seed}));
    const TrunkConfig cfg{2, 3, 5};
    auto params = TrunkParams<double>::init(cfg, rng);
    for (auto& layer : params.layers) {
      for (double& v : layer.gate_bias.data()) v = uniform01(rng) - 0.5;
    }
    Array<double> x = testing::random_array({1, 1, 40}, rng);
    const Array<double> y = trunk_forward(x, params, cfg);
    const auto ref = reference_trunk({x.data().begin(), x.data().end()}, params, cfg);
    ASSERT_EQ(y.size(), ref.size());
    for (std::size_t i = 0; i < ref.size(); ++i) EXPECT_NEAR(y.data()[i], ref[i], 1e-12);
  }
}

TEST(TrunkForwardTest, BatchRowsAreIndependent) {
  Rng rng(4);
  const TrunkConfig cfg{1, 3, 4};
  const auto params = TrunkParams<float>::init(cfg, rng);
  Array<float> both(Shape{2, 1, 16});
  for (float& v : both.data()) v = static_cast<float>(uniform01(rng) - 0.5);
  Array<float> first(Shape{1, 1, 16},
                     std::vector<float>(both.data().begin(), both.data().begin() + 16));
  const Array<float> a = trunk_forward(both, params, cfg);
  const Array<float> b = trunk_forward(first, params, cfg);
  for (std::size_t i = 0; i < b.size(); ++i) EXPECT_FLOAT_EQ(a.data()[i], b.data()[i]);
}

TEST(TrunkForwardTest, FutureSamplesDoNotLeak) {
  Rng rng(5);
  const TrunkConfig cfg{2, 4, 6};
  const auto params = TrunkParams<float>::init(cfg, rng);
  for (int trial = 0; trial < 20; ++trial) {
    Array<float> x(Shape{1, 1, 64});
    for (float& v : x.data()) v = static_cast<float>(uniform01(rng) - 0.5);
    const auto t = static_cast<std::size_t>(uniform01(rng) * 63);
    Array<float> y = x.clone();
    for (std::size_t s = t + 1; s < 64; ++s) y.data()[s] += 1.0f;
    const Array<float> a = trunk_forward(x, params, cfg);
    const Array<float> b = trunk_forward(y, params, cfg);
    for (std::size_t ch = 0; ch < 6; ++ch) {
      EXPECT_EQ(std::memcmp(&a.data()[ch * 64], &b.data()[ch * 64], (t + 1) * sizeof(float)), 0);
    }
  }
}

TEST(TrunkForwardTest, GradientMatchesFiniteDifferences) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng(derive_seed(6, {seed}));
    const TrunkConfig cfg{1, 2, 3};
    auto params = std::make_shared<TrunkParams<double>>(TrunkParams<double>::init(cfg, rng));
    std::vector<Array<double>> leaves;
    for (const auto& p : params->named_parameters()) leaves.push_back(p.value);
    Array<double> x = testing::random_array({2, 1, 9}, rng);
    leaves.push_back(x);
    Array<double> target = testing::random_array({2, 3, 9}, rng);
    auto loss = [=] { return ndgrad::mse_loss(trunk_forward(x, *params, cfg), target); };
    const auto a = testing::tape_gradients(leaves, loss);
    const auto n = testing::numeric_gradients(leaves, loss);
    EXPECT_LT(testing::max_relative_error(a, n), 1e-5);
  }
}

TEST(TrunkForwardTest, RejectsMultiChannelInput) {
  Rng rng(7);
  const TrunkConfig cfg{1, 2, 4};
  const auto params = TrunkParams<float>::init(cfg, rng);
  EXPECT_THROW(trunk_forward(Array<float>(Shape{1, 2, 8}), params, cfg), std::invalid_argument);
}

}  // namespace
}  // namespace wavetrunk
