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


#include "cli/verify.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <functional>
#include <iomanip>
#include <numbers>
#include <numeric>
#include <sstream>
#include <utility>

#include <nlohmann/json.hpp>

#include "wavetrunk/audio/audio.h"
#include "wavetrunk/errors.h"
#include "wavetrunk/heads/heads.h"
#include "wavetrunk/metrics/metrics.h"
#include "wavetrunk/ndgrad/adam.h"
#include "wavetrunk/ndgrad/losses.h"
#include "wavetrunk/ndgrad/ops.h"
#include "wavetrunk/ndgrad/tape.h"
#include "wavetrunk/train/checkpoint.h"
#include "wavetrunk/train/model.h"
#include "wavetrunk/train/trainer.h"
#include "wavetrunk/trunk.h"

namespace wavetrunk::cli {

namespace {

using ndgrad::Array;
using ndgrad::Mode;
using ndgrad::Shape;

constexpr std::size_t kGradSeeds = 5;

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(3) << std::scientific << v;
  return s.str();
}

template <typename Fn>
CheckResult timed(std::string suite, std::string name, Fn fn) {
  const auto start = std::chrono::steady_clock::now();
  CheckResult r{std::move(suite), std::move(name), false, {}, 0.0};
  try {
    std::tie(r.passed, r.detail) = fn();
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string("error=\"") + e.what() + "\"";
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

// ---------------------------------------------------------------- gradcheck

Array<double> uniform(Shape shape, Rng& rng, double lo = -1.0, double hi = 1.0) {
  Array<double> a(std::move(shape));
  for (double& v : a.data()) v = lo + (hi - lo) * uniform01(rng);
  return a;
}

// Values with |v| in [margin, 1], away from the kink at zero.
Array<double> away_from_zero(Shape shape, Rng& rng, double margin) {
  Array<double> a(std::move(shape));
  for (double& v : a.data()) {
    const double mag = margin + (1.0 - margin) * uniform01(rng);
    v = uniform01(rng) < 0.5 ? -mag : mag;
  }
  return a;
}

struct GradCase {
  std::vector<Array<double>> leaves;
  std::function<Array<double>()> loss;
  std::size_t parameters = 0;
};

// Scalar loss of an op output against a fixed random target.
std::function<Array<double>()> mse_of(std::function<Array<double>()> op, Shape shape,
                                      Rng& rng) {
  Array<double> target = uniform(std::move(shape), rng);
  return [op = std::move(op), target] { return ndgrad::mse_loss(op(), target); };
}

// Largest relative difference between the tape gradient and central
// differences over every leaf element.
double max_relative_error(GradCase& c, bool corrupt) {
  for (auto& leaf : c.leaves) {
    leaf.set_requires_grad(true);
    leaf.release_grad();
  }
  {
    ndgrad::Tape<double> tape;
    ndgrad::TapeScope<double> scope(tape);
    tape.backward(c.loss());
  }
  std::vector<std::vector<double>> analytic;
  for (const auto& leaf : c.leaves) {
    std::vector<double> g(leaf.size(), 0.0);
    if (leaf.has_grad()) std::copy(leaf.grad().begin(), leaf.grad().end(), g.begin());
    analytic.push_back(std::move(g));
  }
  if (corrupt) analytic[0][0] += 0.5 * std::max(std::abs(analytic[0][0]), 1e-3);

  constexpr double h = 1e-5;
  double worst = 0.0;
  for (std::size_t l = 0; l < c.leaves.size(); ++l) {
    std::span<double> values = c.leaves[l].data();
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double saved = values[i];
      values[i] = saved + h;
      const double up = c.loss().item();
      values[i] = saved - h;
      const double down = c.loss().item();
      values[i] = saved;
      const double numeric = (up - down) / (2.0 * h);
      const double a = analytic[l][i];
      const double denom = std::max({std::abs(a), std::abs(numeric), 1e-6});
      worst = std::max(worst, std::abs(a - numeric) / denom);
    }
  }
  return worst;
}

struct GradSpec {
  std::string name;
  double tolerance;
  std::function<GradCase(Rng&, std::size_t)> make;
};

template <typename Op>
GradSpec unary(std::string name, Op op, double lo, double hi) {
  return {name, 1e-4, [op, lo, hi](Rng& rng, std::size_t) {
            Array<double> x = uniform({2, 3, 4}, rng, lo, hi);
            return GradCase{{x}, mse_of([x, op] { return op(x); }, {2, 3, 4}, rng)};
          }};
}

template <typename Op>
GradSpec binary(std::string name, Op op) {
  return {name, 1e-4, [op](Rng& rng, std::size_t) {
            Array<double> a = uniform({2, 3, 4}, rng);
            Array<double> b = uniform({2, 3, 4}, rng);
            return GradCase{{a, b}, mse_of([a, b, op] { return op(a, b); }, {2, 3, 4}, rng)};
          }};
}

std::size_t count(const std::vector<ndgrad::NamedParameter<double>>& params) {
  std::size_t n = 0;
  for (const auto& p : params) n += p.value.size();
  return n;
}

// Tiny trunk plus one head in double precision; every parameter and the
// waveform are leaves.
GradCase composite(Rng& rng, heads::HeadSpec spec, TrunkConfig trunk_cfg,
                   std::size_t batch, std::size_t length, std::uint64_t dropout_seed) {
  auto trunk = std::make_shared<TrunkParams<double>>(TrunkParams<double>::init(trunk_cfg, rng));
  for (auto& layer : trunk->layers) {
    for (Array<double>* b : {&layer.filter_bias, &layer.gate_bias}) {
      for (double& v : b->data()) v = 0.2 * (2.0 * uniform01(rng) - 1.0);
    }
  }
  const std::size_t rf = receptive_field(trunk_cfg);
  auto head = std::make_shared<heads::Head<double>>(spec, trunk_cfg.channels, rf, rng);
  GradCase c;
  for (const auto& p : trunk->named_parameters()) c.leaves.push_back(p.value);
  const auto head_params = head->named_parameters("head");
  for (const auto& p : head_params) c.leaves.push_back(p.value);
  c.parameters = trunk->parameter_count() + count(head_params);
  Array<double> x = uniform({batch, 1, length}, rng);
  c.leaves.push_back(x);

  const heads::HeadKind kind = spec.kind;
  std::vector<std::size_t> labels;
  for (std::size_t b = 0; b < batch; ++b) {
    labels.push_back(static_cast<std::size_t>(uniform01(rng) * spec.num_classes));
  }
  Array<double> target = uniform({batch, 1, length}, rng, -0.5, 0.5);
  const Array<double> next = x.clone();
  c.loss = [=] {
    Rng drop(dropout_seed);
    Array<double> emb = trunk_forward(x, *trunk, trunk_cfg);
    Array<double> out = head->forward(emb, Mode::kTrain, drop);
    switch (kind) {
      case heads::HeadKind::kNextStep:
        return heads::next_step_loss(out, next, head->warmup());
      case heads::HeadKind::kDenoise:
      case heads::HeadKind::kUpsample:
        return heads::delayed_smooth_l1_loss(out, target, head->delay());
      default:
        return ndgrad::softmax_cross_entropy(out, std::span<const std::size_t>(labels));
    }
  };
  return c;
}

std::vector<GradSpec> grad_specs() {
  std::vector<GradSpec> specs;
  specs.push_back(binary("add", [](const Array<double>& a, const Array<double>& b) {
    return ndgrad::add(a, b);
  }));
  specs.push_back(binary("mul", [](const Array<double>& a, const Array<double>& b) {
    return ndgrad::mul(a, b);
  }));
  specs.push_back(unary("scale", [](const Array<double>& x) { return ndgrad::scale(x, -1.7); },
                        -1.0, 1.0));
  specs.push_back(
      unary("sigmoid", [](const Array<double>& x) { return ndgrad::sigmoid(x); }, -3.0, 3.0));
  specs.push_back(
      unary("tanh", [](const Array<double>& x) { return ndgrad::tanh(x); }, -2.0, 2.0));
  specs.push_back({"relu", 1e-4, [](Rng& rng, std::size_t) {
                     Array<double> x = away_from_zero({2, 3, 4}, rng, 0.05);
                     return GradCase{{x}, mse_of([x] { return ndgrad::relu(x); }, {2, 3, 4}, rng)};
                   }});
  specs.push_back(binary("gated_activation", [](const Array<double>& g, const Array<double>& f) {
    return ndgrad::gated_activation(g, f);
  }));
  specs.push_back({"causal_dilated_conv1d", 1e-4, [](Rng& rng, std::size_t s) {
                     const std::size_t dilation = 1 + s % 3;
                     const std::size_t width = s % 2 == 0 ? 2 : 3;
                     Array<double> x = uniform({2, 3, 10}, rng);
                     Array<double> w = uniform({4, 3, width}, rng);
                     Array<double> b = uniform({4}, rng);
                     return GradCase{{x, w, b}, mse_of([=] {
                                       return ndgrad::causal_dilated_conv1d(x, w, b, dilation);
                                     }, {2, 4, 10}, rng)};
                   }});
  specs.push_back({"strided_conv1d", 1e-4, [](Rng& rng, std::size_t s) {
                     const std::size_t stride = 1 + s % 3;
                     Array<double> x = uniform({2, 3, 17}, rng);
                     Array<double> w = uniform({4, 3, 5}, rng);
                     Array<double> b = uniform({4}, rng);
                     const std::size_t out = ndgrad::strided_output_length(17, 5, stride);
                     return GradCase{{x, w, b}, mse_of([=] {
                                       return ndgrad::strided_conv1d(x, w, b, stride);
                                     }, {2, 4, out}, rng)};
                   }});
  specs.push_back({"global_avg_pool_time", 1e-4, [](Rng& rng, std::size_t) {
                     Array<double> x = uniform({2, 3, 7}, rng);
                     return GradCase{{x}, mse_of([x] { return ndgrad::global_avg_pool_time(x); },
                                                 {2, 3}, rng)};
                   }});
  specs.push_back({"dense", 1e-4, [](Rng& rng, std::size_t) {
                     Array<double> x = uniform({3, 5}, rng);
                     Array<double> w = uniform({5, 4}, rng);
                     Array<double> b = uniform({4}, rng);
                     return GradCase{{x, w, b},
                                     mse_of([=] { return ndgrad::dense(x, w, b); }, {3, 4}, rng)};
                   }});
  specs.push_back({"batch_norm", 1e-3, [](Rng& rng, std::size_t s) {
                     const Shape shape = s % 2 == 0 ? Shape{4, 3} : Shape{3, 2, 5};
                     const std::size_t channels = shape[1];
                     Array<double> x = uniform(shape, rng, -2.0, 2.0);
                     Array<double> gamma = uniform({channels}, rng, 0.5, 1.5);
                     Array<double> beta = uniform({channels}, rng);
                     auto state = std::make_shared<ndgrad::BatchNormState<double>>(channels);
                     return GradCase{{x, gamma, beta}, mse_of([=] {
                                       return ndgrad::batch_norm(x, gamma, beta, *state,
                                                                 Mode::kTrain);
                                     }, shape, rng)};
                   }});
  specs.push_back({"batch_norm_eval", 1e-4, [](Rng& rng, std::size_t) {
                     Array<double> x = uniform({3, 2, 5}, rng);
                     Array<double> gamma = uniform({2}, rng, 0.5, 1.5);
                     Array<double> beta = uniform({2}, rng);
                     auto state = std::make_shared<ndgrad::BatchNormState<double>>(2);
                     state->running_mean = uniform({2}, rng);
                     state->running_var = uniform({2}, rng, 0.5, 2.0);
                     return GradCase{{x, gamma, beta}, mse_of([=] {
                                       return ndgrad::batch_norm(x, gamma, beta, *state,
                                                                 Mode::kEval);
                                     }, {3, 2, 5}, rng)};
                   }});
  specs.push_back({"dropout", 1e-4, [](Rng& rng, std::size_t) {
                     Array<double> x = uniform({2, 3, 6}, rng);
                     const std::uint64_t seed = rng();
                     return GradCase{{x}, mse_of([=] {
                                       Rng mask(seed);
                                       return ndgrad::dropout(x, 0.3, Mode::kTrain, mask);
                                     }, {2, 3, 6}, rng)};
                   }});
  specs.push_back({"slice_time", 1e-4, [](Rng& rng, std::size_t) {
                     Array<double> x = uniform({2, 3, 9}, rng);
                     return GradCase{{x}, mse_of([x] { return ndgrad::slice_time(x, 2, 5); },
                                                 {2, 3, 5}, rng)};
                   }});
  specs.push_back({"softmax_cross_entropy", 1e-4, [](Rng& rng, std::size_t) {
                     Array<double> logits = uniform({4, 5}, rng, -2.0, 2.0);
                     std::vector<std::size_t> labels;
                     for (int i = 0; i < 4; ++i) {
                       labels.push_back(static_cast<std::size_t>(uniform01(rng) * 5));
                     }
                     return GradCase{{logits}, [=] {
                                       return ndgrad::softmax_cross_entropy(
                                           logits, std::span<const std::size_t>(labels));
                                     }};
                   }});
  specs.push_back({"mse_loss", 1e-4, [](Rng& rng, std::size_t) {
                     Array<double> p = uniform({2, 1, 6}, rng);
                     Array<double> t = uniform({2, 1, 6}, rng);
                     return GradCase{{p, t}, [=] { return ndgrad::mse_loss(p, t); }};
                   }});
  specs.push_back({"smooth_l1_loss", 1e-4, [](Rng& rng, std::size_t) {
                     Array<double> t = uniform({2, 1, 8}, rng);
                     Array<double> p(Shape{2, 1, 8});
                     for (std::size_t i = 0; i < p.size(); ++i) {
                       const double mag = uniform01(rng) < 0.5 ? 0.1 + 0.7 * uniform01(rng)
                                                               : 1.2 + 0.8 * uniform01(rng);
                       p.data()[i] = t.data()[i] + (uniform01(rng) < 0.5 ? -mag : mag);
                     }
                     return GradCase{{p, t}, [=] { return ndgrad::smooth_l1_loss(p, t); }};
                   }});

  const TrunkConfig small{1, 2, 4};
  specs.push_back({"composite_trunk_tagging", 1e-3, [small](Rng& rng, std::size_t) {
                     heads::HeadSpec spec = heads::HeadSpec::defaults(heads::HeadKind::kTagging);
                     spec.num_classes = 3;
                     spec.hidden_units = 8;
                     return composite(rng, spec, small, 2, 12, 0);
                   }});
  specs.push_back({"composite_trunk_speaker_id", 1e-3, [small](Rng& rng, std::size_t) {
                     heads::HeadSpec spec = heads::HeadSpec::defaults(heads::HeadKind::kSpeakerId);
                     spec.num_classes = 3;
                     spec.hidden_units = 6;
                     return composite(rng, spec, small, 3, 10, 0);
                   }});
  specs.push_back({"composite_trunk_speech_command", 1e-3, [small](Rng& rng, std::size_t) {
                     heads::HeadSpec spec =
                         heads::HeadSpec::defaults(heads::HeadKind::kSpeechCommand);
                     spec.num_classes = 3;
                     spec.conv_channels = 3;
                     spec.conv_widths = {3, 3, 2};
                     spec.conv_strides = {2, 1, 1};
                     spec.dropout = 0.2;
                     return composite(rng, spec, small, 3, 20, rng());
                   }});
  specs.push_back({"composite_trunk_next_step", 1e-3, [](Rng& rng, std::size_t) {
                     heads::HeadSpec spec = heads::HeadSpec::defaults(heads::HeadKind::kNextStep);
                     spec.hidden_units = 4;
                     spec.warmup_mask = true;
                     return composite(rng, spec, TrunkConfig{2, 2, 3}, 2, 12, 0);
                   }});
  specs.push_back({"composite_trunk_denoise", 1e-3, [](Rng& rng, std::size_t) {
                     heads::HeadSpec spec = heads::HeadSpec::defaults(heads::HeadKind::kDenoise);
                     spec.hidden_units = 4;
                     spec.filter_width = 3;
                     return composite(rng, spec, TrunkConfig{2, 2, 3}, 2, 12, 0);
                   }});
  return specs;
}

std::vector<CheckResult> gradcheck_suite(const VerifyOptions& opt) {
  std::vector<CheckResult> out;
  for (const GradSpec& spec : grad_specs()) {
    out.push_back(timed("gradcheck", spec.name, [&] {
      double worst = 0.0;
      std::size_t params = 0;
      for (std::size_t s = 0; s < kGradSeeds; ++s) {
        Rng rng(derive_seed(opt.seed, {std::hash<std::string>{}(spec.name), s}));
        GradCase c = spec.make(rng, s);
        params = std::max(params, c.parameters);
        worst = std::max(worst, max_relative_error(c, spec.name == opt.corrupt_op));
      }
      std::string detail = "max_rel_err=" + fmt(worst) + " tol=" + fmt(spec.tolerance) +
                           " seeds=" + std::to_string(kGradSeeds);
      bool ok = worst < spec.tolerance;
      if (params > 0) {
        detail += " params=" + std::to_string(params);
        ok = ok && params <= 500;
      }
      return std::make_pair(ok, detail);
    }));
  }
  return out;
}

// ---------------------------------------------------------------------- dsp

audio::AudioClip sine(double hz, double seconds, int rate, double amplitude = 0.5) {
  audio::AudioClip clip;
  clip.sample_rate = rate;
  const auto n = static_cast<std::size_t>(std::llround(seconds * rate));
  clip.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    clip.samples[i] = amplitude * std::sin(2.0 * std::numbers::pi * hz * i / rate);
  }
  return clip;
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = std::min(a.size(), b.size());
  double ab = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  return ab / std::sqrt(aa * bb);
}

// Frequency in [lo, hi] Hz with the largest DFT magnitude, on a 1 Hz grid.
double dominant_frequency(std::span<const double> x, int rate, double lo, double hi) {
  double best = lo, best_mag = -1.0;
  for (double f = lo; f <= hi; f += 1.0) {
    double re = 0.0, im = 0.0;
    const double w = 2.0 * std::numbers::pi * f / rate;
    for (std::size_t i = 0; i < x.size(); ++i) {
      re += x[i] * std::cos(w * i);
      im -= x[i] * std::sin(w * i);
    }
    const double mag = re * re + im * im;
    if (mag > best_mag) {
      best_mag = mag;
      best = f;
    }
  }
  return best;
}

std::vector<CheckResult> dsp_suite(const VerifyOptions& opt) {
  std::vector<CheckResult> out;
  out.push_back(timed("dsp", "mix_at_snr", [&] {
    Rng rng(derive_seed(opt.seed, {101}));
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      const std::size_t n = 200 + static_cast<std::size_t>(uniform01(rng) * 2000);
      audio::AudioClip clean, noise;
      clean.samples.resize(n);
      noise.samples.resize(n + static_cast<std::size_t>(uniform01(rng) * 500));
      const double amp = 0.01 + 2.0 * uniform01(rng);
      for (double& v : clean.samples) v = amp * (2.0 * uniform01(rng) - 1.0);
      for (double& v : noise.samples) v = 2.0 * uniform01(rng) - 1.0;
      const double snr = -10.0 + 40.0 * uniform01(rng);
      const audio::NoisySample mix = audio::mix_at_snr(clean, noise, snr, rng);
      std::vector<double> residual(n);
      for (std::size_t t = 0; t < n; ++t) residual[t] = mix.noisy.samples[t] - mix.clean.samples[t];
      const double measured =
          10.0 * std::log10(audio::power(mix.clean.samples) / audio::power(residual));
      worst = std::max(worst, std::abs(measured - snr));
    }
    return std::make_pair(worst < 1e-6, "cases=1000 max_abs_err_db=" + fmt(worst));
  }));
  out.push_back(timed("dsp", "emphasis_round_trip", [&] {
    Rng rng(derive_seed(opt.seed, {102}));
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
      audio::AudioClip clip;
      clip.samples.resize(16000);
      for (double& v : clip.samples) v = 2.0 * uniform01(rng) - 1.0;
      const audio::AudioClip back = audio::de_emphasis(audio::pre_emphasis(clip, 0.97), 0.97);
      for (std::size_t t = 0; t < clip.size(); ++t) {
        worst = std::max(worst, std::abs(back.samples[t] - clip.samples[t]));
      }
    }
    return std::make_pair(worst < 1e-6, "max_abs_err=" + fmt(worst));
  }));
  out.push_back(timed("dsp", "upsample_pair_periodic", [&] {
    Rng rng(derive_seed(opt.seed, {103}));
    bool ok = true;
    for (int i = 0; i < 20 && ok; ++i) {
      audio::AudioClip clip;
      clip.samples.resize(4001 + static_cast<std::size_t>(uniform01(rng) * 100));
      for (double& v : clip.samples) v = 2.0 * uniform01(rng) - 1.0;
      const auto [input, target] = audio::make_upsample_pair(clip);
      ok = input.size() == clip.size() && target.samples == clip.samples;
      for (std::size_t t = 0; ok && t < input.size(); ++t) {
        ok = input.samples[t] == input.samples[t - t % 4];
      }
    }
    const auto taps = audio::upsample_lowpass();
    const double dc = std::accumulate(taps.begin(), taps.end(), 0.0);
    ok = ok && taps.size() == audio::kUpsampleFilterTaps && std::abs(dc - 1.0) < 1e-12;
    return std::make_pair(ok, "clips=20 filter_dc_gain=" + fmt(dc));
  }));
  out.push_back(timed("dsp", "resample_sine", [&] {
    double worst = 1.0;
    for (int rate : {8000, 22050, 44100, 48000}) {
      const audio::AudioClip in = sine(440.0, 1.0, rate);
      const audio::AudioClip res = audio::resample(in, 16000);
      const audio::AudioClip ref = sine(440.0, 1.0, 16000);
      if (res.size() != ref.size() || res.sample_rate != 16000) {
        return std::make_pair(false, "bad length from rate " + std::to_string(rate));
      }
      worst = std::min(worst, cosine_similarity(res.samples, ref.samples));
    }
    return std::make_pair(worst > 0.999, "rates=8000,22050,44100,48000 min_corr=" +
                                              std::to_string(worst));
  }));
  out.push_back(timed("dsp", "resample_dc", [&] {
    audio::AudioClip dc;
    dc.sample_rate = 44100;
    dc.samples.assign(44100, 0.5);
    const audio::AudioClip res = audio::resample(dc, 16000);
    double worst = 0.0;
    for (std::size_t t = 64; t + 64 < res.size(); ++t) {
      worst = std::max(worst, std::abs(res.samples[t] - 0.5));
    }
    return std::make_pair(worst < 1e-3, "interior_max_abs_err=" + fmt(worst));
  }));
  out.push_back(timed("dsp", "pitch_shift_octave", [&] {
    const audio::AudioClip in = sine(400.0, 1.0, 16000);
    const audio::AudioClip up = audio::pitch_shift(in, 12.0);
    const double f = dominant_frequency(up.samples, 16000, 300.0, 1000.0);
    const bool ok = up.size() == in.size() && std::abs(f - 800.0) <= 10.0;
    return std::make_pair(ok, "peak_hz=" + std::to_string(f));
  }));
  out.push_back(timed("dsp", "rms_normalize", [&] {
    Rng rng(derive_seed(opt.seed, {104}));
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      audio::AudioClip clip;
      clip.samples.resize(1000);
      const double amp = 1e-3 + uniform01(rng);
      for (double& v : clip.samples) v = amp * (2.0 * uniform01(rng) - 1.0);
      const double rms = std::sqrt(audio::power(audio::rms_normalize(clip, 0.1).samples));
      worst = std::max(worst, std::abs(rms - 0.1));
    }
    return std::make_pair(worst < 1e-9, "max_abs_err=" + fmt(worst));
  }));
  out.push_back(timed("dsp", "crop_or_pad", [&] {
    Rng rng(derive_seed(opt.seed, {105}));
    bool ok = true;
    for (int i = 0; i < 100 && ok; ++i) {
      audio::AudioClip clip;
      clip.samples.resize(1 + static_cast<std::size_t>(uniform01(rng) * 64000));
      std::iota(clip.samples.begin(), clip.samples.end(), 1.0);
      const audio::AudioClip c = audio::crop_or_pad(clip, 2.0, rng);
      ok = c.size() == 32000;
      if (clip.size() >= 32000) {
        const auto start = static_cast<std::size_t>(c.samples[0]) - 1;
        ok = ok && std::equal(c.samples.begin(), c.samples.end(), clip.samples.begin() + start);
      } else {
        ok = ok && std::equal(clip.samples.begin(), clip.samples.end(), c.samples.begin()) &&
             std::all_of(c.samples.begin() + clip.size(), c.samples.end(),
                         [](double v) { return v == 0.0; });
      }
    }
    return std::make_pair(ok, std::string("cases=100"));
  }));
  return out;
}

// -------------------------------------------------------------------- props

// Number of trailing input samples whose perturbation changes the last
// output frame. Row r of the batch perturbs sample r - 1; row 0 is the base.
std::size_t measure_receptive_field(const TrunkConfig& cfg, std::uint64_t seed) {
  Rng rng(seed);
  auto params = TrunkParams<double>::init(cfg, rng);
  for (auto& layer : params.layers) {
    for (Array<double>* b : {&layer.filter_bias, &layer.gate_bias}) {
      for (double& v : b->data()) v = 0.2 * (2.0 * uniform01(rng) - 1.0);
    }
  }
  const std::size_t formula = receptive_field(cfg);
  const std::size_t len = formula + 8;
  const std::size_t rows = len + 1;
  Array<double> x(Shape{rows, 1, len});
  std::vector<double> base(len);
  for (double& v : base) v = 2.0 * uniform01(rng) - 1.0;
  for (std::size_t r = 0; r < rows; ++r) {
    std::copy(base.begin(), base.end(), x.data().begin() + r * len);
    if (r > 0) x.data()[r * len + (r - 1)] += 1.0;
  }
  const Array<double> y = trunk_forward(x, params, cfg);
  const std::size_t c = cfg.channels;
  auto last_frame = [&](std::size_t r, std::size_t ch) {
    return y.data()[(r * c + ch) * len + (len - 1)];
  };
  std::size_t earliest = len;
  for (std::size_t s = 0; s < len; ++s) {
    bool changed = false;
    for (std::size_t ch = 0; ch < c && !changed; ++ch) {
      changed = last_frame(s + 1, ch) != last_frame(0, ch);
    }
    if (changed) {
      earliest = s;
      break;
    }
  }
  return earliest == len ? 0 : len - earliest;
}

std::vector<CheckResult> props_suite(const VerifyOptions& opt) {
  std::vector<CheckResult> out;
  const std::vector<std::pair<std::string, TrunkConfig>> rf_cases = {
      {"receptive_field_n1_s2", {1, 2, 8}},
      {"receptive_field_n2_s3", {2, 3, 8}},
      {"receptive_field_n3_s6", {3, 6, 8}},
      {"receptive_field_default", TrunkConfig{}},
  };
  for (const auto& [name, cfg] : rf_cases) {
    out.push_back(timed("props", name, [&, cfg = cfg] {
      const std::size_t formula =
          1 + cfg.num_blocks * ((std::size_t{1} << cfg.layers_per_block) - 1);
      const std::size_t measured = measure_receptive_field(cfg, derive_seed(opt.seed, {201}));
      bool ok = measured == formula && receptive_field(cfg) == formula;
      if (name == "receptive_field_default") ok = ok && measured == 190;
      return std::make_pair(ok, "measured=" + std::to_string(measured) +
                                    " formula=" + std::to_string(formula));
    }));
  }
  out.push_back(timed("props", "causality", [&] {
    Rng rng(derive_seed(opt.seed, {202}));
    int violations = 0;
    for (int trial = 0; trial < 100; ++trial) {
      const TrunkConfig cfg{static_cast<std::size_t>(1 + trial % 3),
                             static_cast<std::size_t>(2 + trial % 3), 4};
      auto params = TrunkParams<float>::init(cfg, rng);
      const std::size_t len = 48;
      const auto t = static_cast<std::size_t>(uniform01(rng) * (len - 1));
      Array<float> x(Shape{1, 1, len});
      for (float& v : x.data()) v = static_cast<float>(2.0 * uniform01(rng) - 1.0);
      Array<float> perturbed = x.clone();
      for (std::size_t s = t + 1; s < len; ++s) {
        perturbed.data()[s] = static_cast<float>(4.0 * uniform01(rng) - 2.0);
      }
      const Array<float> a = trunk_forward(x, params, cfg);
      const Array<float> b = trunk_forward(perturbed, params, cfg);
      for (std::size_t ch = 0; ch < cfg.channels; ++ch) {
        for (std::size_t f = 0; f <= t; ++f) {
          const float va = a.data()[ch * len + f];
          const float vb = b.data()[ch * len + f];
          if (std::memcmp(&va, &vb, sizeof(float)) != 0) ++violations;
        }
      }
    }
    return std::make_pair(violations == 0,
                          "trials=100 changed_frames=" + std::to_string(violations));
  }));
  out.push_back(timed("props", "smooth_l1_values", [&] {
    const double d[] = {0.5, 1.0, 2.0};
    const double want[] = {0.125, 0.5, 1.5};
    bool ok = true;
    for (int i = 0; i < 3; ++i) {
      ok = ok && ndgrad::smooth_l1(d[i]) == want[i] && ndgrad::smooth_l1(-d[i]) == want[i];
      ok = ok && ndgrad::smooth_l1(static_cast<float>(d[i])) == static_cast<float>(want[i]);
      Array<double> p(Shape{1}, std::vector<double>{d[i]});
      Array<double> z(Shape{1});
      ok = ok && ndgrad::smooth_l1_loss(p, z).item() == want[i];
    }
    return std::make_pair(ok, std::string("d=0.5,1,2 expected=0.125,0.5,1.5"));
  }));
  out.push_back(timed("props", "cross_entropy_uniform", [&] {
    double worst = 0.0;
    for (std::size_t classes : {2, 3, 12, 41, 1251}) {
      for (float level : {0.0f, 3.5f, -7.25f}) {
        Array<float> logits = Array<float>::full(Shape{2, classes}, level);
        const std::vector<std::size_t> labels = {0, classes - 1};
        const double ce = ndgrad::softmax_cross_entropy(logits, labels).item();
        worst = std::max(worst, std::abs(ce - std::log(static_cast<double>(classes))));
      }
    }
    return std::make_pair(worst < 1e-6, "max_abs_err=" + fmt(worst));
  }));
  out.push_back(timed("props", "next_step_per_frame", [&] {
    Rng rng(derive_seed(opt.seed, {203}));
    double worst = 0.0;
    for (std::size_t warmup : {0, 3}) {
      const std::size_t len = 20;
      Array<double> x(Shape{1, 1, len});
      for (double& v : x.data()) v = 2.0 * uniform01(rng) - 1.0;
      std::vector<double> y(len);
      for (double& v : y) v = 2.0 * uniform01(rng) - 1.0;
      const double frames = static_cast<double>(len - 1 - warmup);
      double oracle_total = 0.0;
      for (std::size_t t = 0; t < len; ++t) {
        // Prediction exact everywhere except frame t.
        Array<double> pred(Shape{1, 1, len});
        for (std::size_t s = 0; s + 1 < len; ++s) pred.data()[s] = x.data()[s + 1];
        pred.data()[t] = y[t];
        const double got = heads::next_step_loss(pred, x, warmup).item() * frames;
        const bool counted = t >= warmup && t + 1 < len;
        const double d = counted ? y[t] - x.data()[t + 1] : 0.0;
        worst = std::max(worst, std::abs(got - d * d));
        oracle_total += d * d;
      }
      Array<double> pred(Shape{1, 1, len}, y);
      const double total = heads::next_step_loss(pred, x, warmup).item();
      worst = std::max(worst, std::abs(total - oracle_total / frames));
    }
    return std::make_pair(worst < 1e-12, "max_abs_err=" + fmt(worst));
  }));
  out.push_back(timed("props", "metrics_brute_force", [&] {
    Rng rng(derive_seed(opt.seed, {204}));
    std::size_t mismatches = 0;
    for (int i = 0; i < 1000; ++i) {
      const std::size_t classes = 3 + static_cast<std::size_t>(uniform01(rng) * 40);
      std::vector<float> row(classes);
      // Coarse levels so ties are common.
      for (float& v : row) v = static_cast<float>(std::floor(uniform01(rng) * 8.0));
      const auto label = static_cast<std::size_t>(uniform01(rng) * classes);
      std::vector<std::size_t> order(classes);
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return row[a] > row[b]; });
      const std::size_t rank =
          1 + static_cast<std::size_t>(std::find(order.begin(), order.end(), label) - order.begin());
      const double ap = rank <= 3 ? 1.0 / static_cast<double>(rank) : 0.0;
      const std::vector<std::size_t> labels = {label};
      const std::span<const float> logits(row);
      for (std::size_t k : {std::size_t{1}, std::size_t{3}, std::size_t{5}}) {
        if (k > classes) continue;
        const double want = rank <= k ? 1.0 : 0.0;
        if (metrics::top_k_accuracy<float>(logits, classes, labels, k) != want) ++mismatches;
      }
      if (metrics::map_at_3<float>(logits, classes, labels) != ap) ++mismatches;
      if (metrics::label_rank<float>(logits, label) != rank) ++mismatches;
    }
    return std::make_pair(mismatches == 0, "cases=1000 mismatches=" + std::to_string(mismatches));
  }));
  out.push_back(timed("props", "map_at_3_random_expectation", [&] {
    Rng rng(derive_seed(opt.seed, {205}));
    const std::size_t classes = 41, samples = 100000;
    std::vector<float> logits(classes * samples);
    for (float& v : logits) v = static_cast<float>(uniform01(rng));
    std::vector<std::size_t> labels(samples);
    for (auto& l : labels) l = static_cast<std::size_t>(uniform01(rng) * classes);
    const double got = metrics::map_at_3<float>(logits, classes, labels);
    const double want = (1.0 + 1.0 / 2.0 + 1.0 / 3.0) / 41.0;
    return std::make_pair(std::abs(got - want) <= 0.005,
                          "map_at_3=" + std::to_string(got) + " expected=" + std::to_string(want));
  }));
  out.push_back(timed("props", "checkpoint_round_trip", [&] {
    train::ModelSpec spec;
    spec.trunk = TrunkConfig{1, 3, 8};
    heads::HeadSpec tag = heads::HeadSpec::defaults(heads::HeadKind::kTagging);
    tag.num_classes = 4;
    tag.hidden_units = 16;
    heads::HeadSpec speaker = heads::HeadSpec::defaults(heads::HeadKind::kSpeakerId);
    speaker.num_classes = 3;
    speaker.hidden_units = 8;
    spec.heads = {{"tagging", tag, {"a", "b", "c", "d"}},
                  {"speaker", speaker, {"x", "y", "z"}},
                  {"denoise", heads::HeadSpec::defaults(heads::HeadKind::kDenoise), {}}};
    const train::Model model(spec, derive_seed(opt.seed, {206}));
    train::Checkpoint ckpt;
    ckpt.epoch = 7;
    ckpt.config_json = nlohmann::json{{"model", nlohmann::json::parse(spec.to_json())}}.dump();
    for (const auto& t : model.named_tensors()) ckpt.add_f32(t.name, t.value);
    const auto bytes = train::serialize(ckpt);
    const train::Checkpoint back = train::deserialize(bytes, "memory");
    bool ok = train::serialize(back) == bytes && back.epoch == 7;
    train::Model other(spec, derive_seed(opt.seed, {207}));
    train::restore_model(back, other);
    const auto a = model.named_tensors();
    const auto b = other.named_tensors();
    ok = ok && a.size() == b.size();
    for (std::size_t i = 0; ok && i < a.size(); ++i) {
      ok = a[i].name == b[i].name && a[i].value.shape() == b[i].value.shape() &&
           std::memcmp(a[i].value.data().data(), b[i].value.data().data(),
                       a[i].value.size() * sizeof(float)) == 0;
    }
    return std::make_pair(ok, "tensors=" + std::to_string(a.size()) +
                                  " bytes=" + std::to_string(bytes.size()));
  }));
  out.push_back(timed("props", "lr_schedule", [&] {
    const ndgrad::LrSchedule schedule{5, 0.95};
    double worst = 0.0;
    double expected = 3e-4;
    for (std::uint64_t epoch = 0; epoch < 200; ++epoch) {
      if (epoch > 0 && epoch % 5 == 0) expected *= 0.95;
      const double got = schedule.effective_lr(3e-4, epoch);
      worst = std::max(worst, std::abs(got - expected) / expected);
    }
    const bool steps_exact = schedule.effective_lr(3e-4, 4) == 3e-4 &&
                             schedule.effective_lr(3e-4, 5) == 3e-4 * 0.95 &&
                             schedule.effective_lr(3e-4, 9) == 3e-4 * 0.95;
    return std::make_pair(steps_exact && worst < 1e-13, "max_rel_err=" + fmt(worst));
  }));
  return out;
}

}  // namespace

const std::vector<std::string>& verify_suites() {
  static const std::vector<std::string> suites = {"gradcheck", "dsp", "props"};
  return suites;
}

std::vector<CheckResult> run_verify(const std::string& suite, const VerifyOptions& options) {
  if (suite == "all") {
    std::vector<CheckResult> all;
    for (const auto& s : verify_suites()) {
      auto part = run_verify(s, options);
      all.insert(all.end(), part.begin(), part.end());
    }
    return all;
  }
  if (suite == "gradcheck") {
    if (!options.corrupt_op.empty()) {
      const auto specs = grad_specs();
      if (std::none_of(specs.begin(), specs.end(),
                       [&](const GradSpec& s) { return s.name == options.corrupt_op; })) {
        throw ConfigError("unknown op '" + options.corrupt_op + "' for --corrupt-op");
      }
    }
    return gradcheck_suite(options);
  }
  if (suite == "dsp") return dsp_suite(options);
  if (suite == "props") return props_suite(options);
  throw ConfigError("unknown verify suite '" + suite + "' (expected gradcheck, dsp, props or all)");
}

std::string format_check(const CheckResult& r) {
  std::ostringstream s;
  s << "check suite=" << r.suite << " name=" << r.name
    << " result=" << (r.passed ? "pass" : "fail") << " seconds=" << std::fixed
    << std::setprecision(3) << r.seconds << " " << r.detail;
  return s.str();
}

}  // namespace wavetrunk::cli
