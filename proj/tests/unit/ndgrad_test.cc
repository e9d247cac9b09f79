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
#include <numeric>
#include <stdexcept>
#include <vector>

#include "gtest/gtest.h"
#include "test_util.h"
#include "wavetrunk/ndgrad/adam.h"
#include "wavetrunk/ndgrad/array.h"
#include "wavetrunk/ndgrad/losses.h"
#include "wavetrunk/ndgrad/ops.h"
#include "wavetrunk/ndgrad/tape.h"

namespace wavetrunk::ndgrad {
namespace {

using testing::max_relative_error;
using testing::numeric_gradients;
using testing::random_array;
using testing::tape_gradients;

TEST(ArrayTest, ZeroFilledAndShape) {
  Array<float> a(Shape{2, 3});
  EXPECT_EQ(a.size(), 6u);
  EXPECT_EQ(a.rank(), 2u);
  for (float v : a.data()) EXPECT_EQ(v, 0.0f);
  EXPECT_THROW(Array<float>(Shape{2, 0}), std::invalid_argument);
  EXPECT_THROW(Array<float>(Shape{2}, std::vector<float>{1, 2, 3}), std::invalid_argument);
  EXPECT_THROW(a.dim(2), std::out_of_range);
  EXPECT_THROW(a.item(), std::invalid_argument);
}

TEST(ArrayTest, CopiesShareStorageClonesDoNot) {
  Array<double> a(Shape{3}, std::vector<double>{1, 2, 3});
  Array<double> alias = a;
  Array<double> deep = a.clone();
  alias.data()[0] = 9;
  EXPECT_EQ(a.data()[0], 9);
  EXPECT_EQ(deep.data()[0], 1);
  EXPECT_TRUE(alias.shares_storage(a));
  EXPECT_FALSE(deep.shares_storage(a));
}

TEST(ArrayTest, StorageIsAligned) {
  for (std::size_t n : {1u, 3u, 17u, 1000u}) {
    Array<float> a(Shape{n});
    EXPECT_EQ(reinterpret_cast<std::uintptr_t>(a.data().data()) % 64, 0u);
    EXPECT_EQ(reinterpret_cast<std::uintptr_t>(a.grad_buffer().data()) % 64, 0u);
  }
}

TEST(TapeTest, NothingRecordedWithoutScope) {
  Array<double> x(Shape{2}, std::vector<double>{1, 2}, true);
  Array<double> y = mul(x, x);
  Tape<double> tape;
  EXPECT_EQ(tape.size(), 0u);
  EXPECT_TRUE(y.is_leaf());
}

TEST(TapeTest, ReusedOperandAccumulates) {
  Array<double> x(Shape{3}, std::vector<double>{1, -2, 3}, true);
  Tape<double> tape;
  TapeScope<double> scope(tape);
  // loss = mean((x + x)^2) -> d/dx = 8 x / 3
  Array<double> twice = add(x, x);
  tape.backward(mse_loss(twice, Array<double>(Shape{3})));
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_NEAR(x.grad()[i], 8.0 * x.data()[i] / 3.0, 1e-12);
  }
  EXPECT_FALSE(twice.has_grad());
}

TEST(TapeTest, SecondBackwardAndNonScalarRejected) {
  Array<double> x(Shape{2}, std::vector<double>{1, 2}, true);
  Tape<double> tape;
  TapeScope<double> scope(tape);
  Array<double> y = tanh(x);
  EXPECT_THROW(tape.backward(y), std::invalid_argument);
  Array<double> loss = mse_loss(y, Array<double>(Shape{2}));
  tape.backward(loss);
  EXPECT_THROW(tape.backward(loss), std::logic_error);
  tape.reset();
  EXPECT_EQ(tape.size(), 0u);
}

TEST(TapeTest, ScopesNest) {
  Tape<float> outer, inner;
  TapeScope<float> a(outer);
  EXPECT_EQ(Tape<float>::current(), &outer);
  {
    TapeScope<float> b(inner);
    EXPECT_EQ(Tape<float>::current(), &inner);
  }
  EXPECT_EQ(Tape<float>::current(), &outer);
}

TEST(OpsTest, CausalConvMatchesHandComputation) {
  // One channel, taps {a, b}, dilation 2: y[t] = a x[t-2] + b x[t] + bias.
  Array<double> x(Shape{1, 1, 5}, std::vector<double>{1, 2, 3, 4, 5});
  Array<double> w(Shape{1, 1, 2}, std::vector<double>{0.5, -1.0});
  Array<double> b(Shape{1}, std::vector<double>{0.25});
  Array<double> y = causal_dilated_conv1d(x, w, b, 2);
  const std::vector<double> want = {-0.75, -1.75, -2.25, -2.75, -3.25};
  for (std::size_t t = 0; t < 5; ++t) EXPECT_DOUBLE_EQ(y.data()[t], want[t]);
}

TEST(OpsTest, StridedConvLength) {
  EXPECT_EQ(strided_output_length(32000, 100, 16), (32000 - 100) / 16 + 1);
  EXPECT_EQ(strided_output_length(10, 10, 3), 1u);
  EXPECT_THROW(strided_output_length(9, 10, 1), std::invalid_argument);
}

TEST(OpsTest, ShapeMismatchThrows) {
  Array<float> a(Shape{2, 3}), b(Shape{3, 2});
  EXPECT_THROW(add(a, b), std::invalid_argument);
  Array<float> x(Shape{1, 2, 8}), w(Shape{4, 3, 2}), bias(Shape{4});
  EXPECT_THROW(causal_dilated_conv1d(x, w, bias, 1), std::invalid_argument);
}

TEST(OpsTest, BatchNormTrainNormalizesAndTracksUnbiasedVariance) {
  Rng rng(4);
  Array<double> x = random_array({6, 2, 5}, rng, -3.0, 3.0);
  Array<double> gamma = Array<double>::full(Shape{2}, 1.0);
  Array<double> beta(Shape{2});
  BatchNormState<double> state(2);
  Array<double> y = batch_norm(x, gamma, beta, state, Mode::kTrain);
  for (std::size_t c = 0; c < 2; ++c) {
    double mean = 0, sq = 0, xm = 0, xsq = 0;
    const double n = 30;
    for (std::size_t b = 0; b < 6; ++b) {
      for (std::size_t t = 0; t < 5; ++t) {
        const std::size_t i = (b * 2 + c) * 5 + t;
        mean += y.data()[i] / n;
        sq += y.data()[i] * y.data()[i] / n;
        xm += x.data()[i] / n;
      }
    }
    for (std::size_t b = 0; b < 6; ++b) {
      for (std::size_t t = 0; t < 5; ++t) {
        const double d = x.data()[(b * 2 + c) * 5 + t] - xm;
        xsq += d * d;
      }
    }
    EXPECT_NEAR(mean, 0.0, 1e-12);
    EXPECT_NEAR(sq, 1.0, 1e-3);  // epsilon keeps it just under 1
    EXPECT_NEAR(state.running_mean.data()[c], 0.1 * xm, 1e-12);
    EXPECT_NEAR(state.running_var.data()[c], 0.9 + 0.1 * xsq / (n - 1), 1e-12);
  }
}

TEST(OpsTest, DropoutEvalIsIdentityTrainRescales) {
  Rng rng(5);
  Array<float> x = Array<float>::full(Shape{1, 1, 20000}, 1.0f);
  Array<float> eval = dropout(x, 0.5, Mode::kEval, rng);
  EXPECT_TRUE(std::equal(eval.data().begin(), eval.data().end(), x.data().begin()));
  Array<float> train = dropout(x, 0.25, Mode::kTrain, rng);
  std::size_t kept = 0;
  for (float v : train.data()) {
    if (v != 0.0f) {
      EXPECT_FLOAT_EQ(v, 1.0f / 0.75f);
      ++kept;
    }
  }
  EXPECT_NEAR(static_cast<double>(kept) / 20000.0, 0.75, 0.02);
}

TEST(LossTest, SmoothL1Values) {
  EXPECT_EQ(smooth_l1(0.5), 0.125);
  EXPECT_EQ(smooth_l1(1.0), 0.5);
  EXPECT_EQ(smooth_l1(2.0), 1.5);
  EXPECT_EQ(smooth_l1(-2.0f), 1.5f);
}

TEST(LossTest, CrossEntropyMatchesLogSumExpOracle) {
  Rng rng(6);
  for (int seed = 0; seed < 5; ++seed) {
    Array<double> logits = random_array({3, 7}, rng, -50.0, 50.0);
    const std::vector<std::size_t> labels = {0, 3, 6};
    double want = 0.0;
    for (std::size_t b = 0; b < 3; ++b) {
      const double* row = logits.data().data() + b * 7;
      const double mx = *std::max_element(row, row + 7);
      double s = 0.0;
      for (int j = 0; j < 7; ++j) s += std::exp(row[j] - mx);
      want += (mx + std::log(s) - row[labels[b]]) / 3.0;
    }
    EXPECT_NEAR(softmax_cross_entropy(logits, labels).item(), want, 1e-12);
  }
  Array<float> huge = Array<float>::full(Shape{1, 4}, 1000.0f);
  const std::vector<std::size_t> l = {2};
  EXPECT_NEAR(softmax_cross_entropy(huge, l).item(), std::log(4.0), 1e-6);
  const std::vector<std::size_t> bad = {4};
  EXPECT_THROW(softmax_cross_entropy(huge, bad), std::invalid_argument);
}

// Finite-difference oracle per op, double precision, five seeds each.
struct OpCase {
  const char* name;
  std::function<std::pair<std::vector<Array<double>>, std::function<Array<double>()>>(Rng&)>
      make;
};

std::function<Array<double>()> against_target(std::function<Array<double>()> f, Shape s,
                                              Rng& rng) {
  Array<double> t = random_array(std::move(s), rng);
  return [f, t] { return mse_loss(f(), t); };
}

class GradientOracleTest : public ::testing::TestWithParam<OpCase> {};

TEST_P(GradientOracleTest, MatchesCentralDifferences) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng rng(derive_seed(1234, {seed}));
    auto [leaves, loss] = GetParam().make(rng);
    const auto analytic = tape_gradients(leaves, loss);
    const auto numeric = numeric_gradients(leaves, loss);
    EXPECT_LT(max_relative_error(analytic, numeric), 1e-5) << "seed " << seed;
  }
}

INSTANTIATE_TEST_SUITE_P(
    Ops, GradientOracleTest,
    ::testing::Values(
        OpCase{"mul",
               [](Rng& rng) {
                 Array<double> a = random_array({2, 5}, rng), b = random_array({2, 5}, rng);
                 return std::make_pair(std::vector{a, b},
                                       against_target([=] { return mul(a, b); }, {2, 5}, rng));
               }},
        OpCase{"gated_activation",
               [](Rng& rng) {
                 Array<double> g = random_array({2, 3, 4}, rng, -2, 2);
                 Array<double> f = random_array({2, 3, 4}, rng, -2, 2);
                 return std::make_pair(
                     std::vector{g, f},
                     against_target([=] { return gated_activation(g, f); }, {2, 3, 4}, rng));
               }},
        OpCase{"causal_conv_dilation_4",
               [](Rng& rng) {
                 Array<double> x = random_array({2, 2, 11}, rng);
                 Array<double> w = random_array({3, 2, 2}, rng);
                 Array<double> b = random_array({3}, rng);
                 return std::make_pair(
                     std::vector{x, w, b},
                     against_target([=] { return causal_dilated_conv1d(x, w, b, 4); },
                                    {2, 3, 11}, rng));
               }},
        OpCase{"strided_conv_stride_3",
               [](Rng& rng) {
                 Array<double> x = random_array({2, 2, 16}, rng);
                 Array<double> w = random_array({3, 2, 4}, rng);
                 Array<double> b = random_array({3}, rng);
                 return std::make_pair(
                     std::vector{x, w, b},
                     against_target([=] { return strided_conv1d(x, w, b, 3); }, {2, 3, 5}, rng));
               }},
        OpCase{"dense",
               [](Rng& rng) {
                 Array<double> x = random_array({4, 3}, rng);
                 Array<double> w = random_array({3, 2}, rng);
                 Array<double> b = random_array({2}, rng);
                 return std::make_pair(std::vector{x, w, b},
                                       against_target([=] { return dense(x, w, b); }, {4, 2}, rng));
               }},
        OpCase{"pool_then_slice",
               [](Rng& rng) {
                 Array<double> x = random_array({2, 3, 9}, rng);
                 return std::make_pair(
                     std::vector{x},
                     against_target([=] { return global_avg_pool_time(slice_time(x, 3, 4)); },
                                    {2, 3}, rng));
               }},
        OpCase{"batch_norm_3d",
               [](Rng& rng) {
                 Array<double> x = random_array({4, 2, 3}, rng);
                 Array<double> g = random_array({2}, rng, 0.5, 2.0);
                 Array<double> b = random_array({2}, rng);
                 auto st = std::make_shared<BatchNormState<double>>(2);
                 return std::make_pair(
                     std::vector{x, g, b},
                     against_target([=] { return batch_norm(x, g, b, *st, Mode::kTrain); },
                                    {4, 2, 3}, rng));
               }},
        OpCase{"cross_entropy",
               [](Rng& rng) {
                 Array<double> z = random_array({3, 4}, rng, -3, 3);
                 std::vector<std::size_t> labels = {1, 0, 3};
                 return std::make_pair(std::vector{z}, std::function<Array<double>()>([=] {
                                         return softmax_cross_entropy(z, labels);
                                       }));
               }}),
    [](const ::testing::TestParamInfo<OpCase>& info) { return std::string(info.param.name); });

TEST(AdamTest, MatchesBiasCorrectedOracle) {
  Rng rng(7);
  Array<double> p = random_array({5}, rng);
  std::vector<double> ref(p.data().begin(), p.data().end());
  std::vector<double> m(5, 0.0), v(5, 0.0);
  AdamConfig cfg;
  cfg.beta0 = 0.9;
  cfg.beta1 = 0.99;
  cfg.epsilon = 1e-8;
  AdamOptimizer<double> opt({{"p", p}}, cfg);
  for (int step = 1; step <= 6; ++step) {
    opt.zero_grad();
    auto g = p.grad_buffer();
    for (std::size_t i = 0; i < 5; ++i) g[i] = std::sin(step * 1.3 + i);
    opt.step(1e-2);
    for (std::size_t i = 0; i < 5; ++i) {
      const double gi = std::sin(step * 1.3 + i);
      m[i] = 0.9 * m[i] + 0.1 * gi;
      v[i] = 0.99 * v[i] + 0.01 * gi * gi;
      const double mh = m[i] / (1 - std::pow(0.9, step));
      const double vh = v[i] / (1 - std::pow(0.99, step));
      ref[i] -= 1e-2 * mh / (std::sqrt(vh) + 1e-8);
      EXPECT_NEAR(p.data()[i], ref[i], 1e-14);
    }
  }
  EXPECT_EQ(opt.config().step_count, 6u);
}

TEST(AdamTest, FirstStepMovesByLearningRate) {
  Array<float> p(Shape{3}, std::vector<float>{0, 0, 0}, true);
  AdamOptimizer<float> opt({{"p", p}}, AdamConfig{});
  auto g = p.grad_buffer();
  g[0] = 3.0f;
  g[1] = -0.001f;
  opt.step(0.5);
  EXPECT_NEAR(p.data()[0], -0.5f, 1e-6);
  EXPECT_NEAR(p.data()[1], 0.5f, 1e-4);
  EXPECT_EQ(p.data()[2], 0.0f);
}

TEST(LrScheduleTest, StepDecay) {
  LrSchedule s;
  EXPECT_EQ(s.epochs_per_step, 5u);
  EXPECT_EQ(s.multiplier, 0.95);
  EXPECT_EQ(s.effective_lr(1.0, 0), 1.0);
  EXPECT_EQ(s.effective_lr(1.0, 4), 1.0);
  EXPECT_EQ(s.effective_lr(1.0, 5), 0.95);
  EXPECT_NEAR(s.effective_lr(2.0, 12), 2.0 * 0.95 * 0.95, 1e-15);
  LrSchedule bad{0, 0.95};
  EXPECT_THROW(bad.validate(), std::invalid_argument);
}

}  // namespace
}  // namespace wavetrunk::ndgrad
