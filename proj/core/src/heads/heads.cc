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

#include "wavetrunk/heads/heads.h"

#include <stdexcept>
#include <string>

#include "wavetrunk/ndgrad/init.h"
#include "wavetrunk/ndgrad/losses.h"

namespace wavetrunk::heads {

using ndgrad::Array;
using ndgrad::Mode;
using ndgrad::NamedParameter;
using ndgrad::Shape;

std::string_view to_string(HeadKind kind) {
  switch (kind) {
    case HeadKind::kTagging:
      return "tagging";
    case HeadKind::kSpeakerId:
      return "speaker_id";
    case HeadKind::kSpeechCommand:
      return "speech_command";
    case HeadKind::kNextStep:
      return "next_step";
    case HeadKind::kDenoise:
      return "denoise";
    case HeadKind::kUpsample:
      return "upsample";
  }
  return "unknown";
}

HeadKind parse_head_kind(std::string_view name) {
  for (HeadKind k : {HeadKind::kTagging, HeadKind::kSpeakerId,
                     HeadKind::kSpeechCommand, HeadKind::kNextStep,
                     HeadKind::kDenoise, HeadKind::kUpsample}) {
    if (to_string(k) == name) return k;
  }
  throw std::invalid_argument("unknown head kind '" + std::string(name) + "'");
}

bool is_classification(HeadKind kind) {
  return kind == HeadKind::kTagging || kind == HeadKind::kSpeakerId ||
         kind == HeadKind::kSpeechCommand;
}

HeadSpec HeadSpec::defaults(HeadKind kind) {
  HeadSpec s;
  s.kind = kind;
  switch (kind) {
    case HeadKind::kTagging:
      s.num_classes = 41;
      s.hidden_units = 512;
      s.lr = 5.37e-5;
      break;
    case HeadKind::kSpeakerId:
      s.num_classes = 1251;
      s.hidden_units = 1024;
      s.lr = 1e-4;
      break;
    case HeadKind::kSpeechCommand:
      s.num_classes = 12;
      s.lr = 1e-4;
      break;
    case HeadKind::kNextStep:
      s.hidden_units = 128;
      s.filter_width = 1;
      s.lr = 5e-3;
      break;
    case HeadKind::kDenoise:
    case HeadKind::kUpsample:
      s.hidden_units = 128;
      s.filter_width = 11;
      s.lr = 5e-3;
      break;
  }
  return s;
}

void HeadSpec::validate() const {
  const std::string name(to_string(kind));
  if (!(lr > 0.0)) throw std::invalid_argument(name + ": lr must be positive");
  if (is_classification(kind) && num_classes == 0) {
    throw std::invalid_argument(name + ": num_classes must be positive");
  }
  if (kind == HeadKind::kSpeechCommand) {
    if (conv_channels == 0) {
      throw std::invalid_argument(name + ": conv_channels must be positive");
    }
    for (std::size_t i = 0; i < 3; ++i) {
      if (conv_widths[i] == 0 || conv_strides[i] == 0) {
        throw std::invalid_argument(name + ": conv widths and strides must be positive");
      }
    }
    if (!(dropout >= 0.0 && dropout < 1.0)) {
      throw std::invalid_argument(name + ": dropout must be in [0, 1)");
    }
  } else if (hidden_units == 0) {
    throw std::invalid_argument(name + ": hidden_units must be positive");
  }
  if (!is_classification(kind) && filter_width == 0) {
    throw std::invalid_argument(name + ": filter_width must be positive");
  }
}

std::size_t default_delay(std::size_t tau) { return (tau - 1) / 2; }

std::size_t speech_command_min_length(std::span<const std::size_t> widths,
                                      std::span<const std::size_t> strides) {
  std::size_t need = 1;
  for (std::size_t i = widths.size(); i-- > 0;) {
    need = widths[i] + (need - 1) * strides[i];
  }
  return need;
}

namespace {

template <typename T>
DenseLayer<T> make_dense(std::size_t in, std::size_t out, Rng& rng) {
  return {ndgrad::he_uniform_array<T>(Shape{in, out}, in, rng),
          Array<T>(Shape{out}, true)};
}

template <typename T>
ConvLayer<T> make_conv(std::size_t in, std::size_t out, std::size_t width,
                       Rng& rng) {
  return {ndgrad::he_uniform_array<T>(Shape{out, in, width}, in * width, rng),
          Array<T>(Shape{out}, true)};
}

template <typename T>
BatchNormLayer<T> make_norm(std::size_t channels) {
  return {Array<T>::full(Shape{channels}, T(1), true), Array<T>(Shape{channels}, true),
          ndgrad::BatchNormState<T>(channels)};
}

template <typename T>
void require_embedding(const Array<T>& emb, const char* op) {
  if (emb.rank() != 3) {
    throw std::invalid_argument(std::string(op) + ": embeddings must be [B,C,T], got " +
                                ndgrad::shape_string(emb.shape()));
  }
}

template <typename T>
void push(std::vector<NamedParameter<T>>& out, const std::string& name,
          const DenseLayer<T>& d) {
  out.push_back({name + ".weight", d.weight});
  out.push_back({name + ".bias", d.bias});
}

template <typename T>
void push(std::vector<NamedParameter<T>>& out, const std::string& name,
          const ConvLayer<T>& c) {
  out.push_back({name + ".weight", c.weight});
  out.push_back({name + ".bias", c.bias});
}

template <typename T>
void push(std::vector<NamedParameter<T>>& out, const std::string& name,
          const BatchNormLayer<T>& n) {
  out.push_back({name + ".gamma", n.gamma});
  out.push_back({name + ".beta", n.beta});
}

template <typename T>
void push_stats(std::vector<NamedParameter<T>>& out, const std::string& name,
                const BatchNormLayer<T>& n) {
  out.push_back({name + ".running_mean", n.state.running_mean});
  out.push_back({name + ".running_var", n.state.running_var});
}

}  // namespace

template <typename T>
Array<T> tagging_forward(const Array<T>& emb, const TaggingParams<T>& params) {
  require_embedding(emb, "tagging_forward");
  Array<T> pooled = ndgrad::global_avg_pool_time(emb);
  Array<T> hidden = ndgrad::relu(
      ndgrad::dense(pooled, params.hidden.weight, params.hidden.bias));
  return ndgrad::dense(hidden, params.output.weight, params.output.bias);
}

template <typename T>
Array<T> speaker_forward(const Array<T>& emb, SpeakerParams<T>& params,
                         Mode mode) {
  require_embedding(emb, "speaker_forward");
  Array<T> h = ndgrad::global_avg_pool_time(emb);
  h = ndgrad::dense(h, params.hidden1.weight, params.hidden1.bias);
  h = ndgrad::relu(ndgrad::batch_norm(h, params.norm1.gamma, params.norm1.beta,
                                      params.norm1.state, mode));
  h = ndgrad::dense(h, params.hidden2.weight, params.hidden2.bias);
  h = ndgrad::relu(ndgrad::batch_norm(h, params.norm2.gamma, params.norm2.beta,
                                      params.norm2.state, mode));
  return ndgrad::dense(h, params.output.weight, params.output.bias);
}

template <typename T>
Array<T> speech_command_forward(const Array<T>& emb,
                                SpeechCommandParams<T>& params, Mode mode,
                                Rng& rng) {
  require_embedding(emb, "speech_command_forward");
  std::array<std::size_t, 3> widths{};
  for (std::size_t i = 0; i < 3; ++i) widths[i] = params.convs[i].weight.dim(2);
  const std::size_t min_len = speech_command_min_length(widths, params.strides);
  if (emb.dim(2) < min_len) {
    throw std::invalid_argument(
        "speech_command_forward: input has " + std::to_string(emb.dim(2)) +
        " frames, the conv stack needs at least " + std::to_string(min_len));
  }
  Array<T> h = emb;
  for (std::size_t i = 0; i < 3; ++i) {
    h = ndgrad::strided_conv1d(h, params.convs[i].weight, params.convs[i].bias,
                               params.strides[i]);
    h = ndgrad::batch_norm(h, params.norms[i].gamma, params.norms[i].beta,
                           params.norms[i].state, mode);
    h = ndgrad::dropout(h, params.dropout, mode, rng);
    h = ndgrad::relu(h);
  }
  h = ndgrad::global_avg_pool_time(h);
  return ndgrad::dense(h, params.output.weight, params.output.bias);
}

template <typename T>
Array<T> regression_forward(const Array<T>& emb,
                            const RegressionParams<T>& params) {
  require_embedding(emb, "regression_forward");
  Array<T> h = ndgrad::relu(ndgrad::causal_dilated_conv1d(
      emb, params.hidden.weight, params.hidden.bias, 1));
  return ndgrad::causal_dilated_conv1d(h, params.output.weight,
                                       params.output.bias, 1);
}

template <typename T>
Array<T> next_step_forward(const Array<T>& emb,
                           const RegressionParams<T>& params) {
  require_embedding(emb, "next_step_forward");
  if (emb.dim(2) < 2) {
    throw std::invalid_argument(
        "next_step_forward: need at least 2 frames to have a next step");
  }
  return regression_forward(emb, params);
}

template <typename T>
Array<T> denoise_forward(const Array<T>& emb,
                         const RegressionParams<T>& params) {
  return regression_forward(emb, params);
}

template <typename T>
Array<T> upsample_forward(const Array<T>& emb,
                          const RegressionParams<T>& params) {
  return regression_forward(emb, params);
}

template <typename T>
Array<T> next_step_loss(const Array<T>& pred, const Array<T>& input,
                        std::size_t warmup) {
  if (pred.rank() != 3 || pred.shape() != input.shape() || pred.dim(1) != 1) {
    throw std::invalid_argument(
        "next_step_loss: prediction and input must both be [B,1,T], got " +
        ndgrad::shape_string(pred.shape()) + " and " +
        ndgrad::shape_string(input.shape()));
  }
  const std::size_t batch = pred.dim(0), len = pred.dim(2);
  if (len < warmup + 2) {
    throw std::invalid_argument("next_step_loss: " + std::to_string(len) +
                                " frames leave nothing to score after a warm-up of " +
                                std::to_string(warmup));
  }
  const std::size_t frames = len - 1 - warmup;
  Array<T> target(Shape{batch, 1, frames});
  auto x = input.data();
  auto y = target.data();
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t t = 0; t < frames; ++t) {
      y[b * frames + t] = x[b * len + warmup + t + 1];
    }
  }
  return ndgrad::mse_loss(ndgrad::slice_time(pred, warmup, frames), target);
}

template <typename T>
Array<T> delayed_smooth_l1_loss(const Array<T>& pred, const Array<T>& target,
                                std::size_t delay) {
  if (pred.rank() != 3 || pred.shape() != target.shape() || pred.dim(1) != 1) {
    throw std::invalid_argument(
        "delayed_smooth_l1_loss: prediction and target must both be [B,1,T], got " +
        ndgrad::shape_string(pred.shape()) + " and " +
        ndgrad::shape_string(target.shape()));
  }
  const std::size_t batch = pred.dim(0), len = pred.dim(2);
  if (len <= delay) {
    throw std::invalid_argument("delayed_smooth_l1_loss: " + std::to_string(len) +
                                " frames is not longer than the delay " +
                                std::to_string(delay));
  }
  const std::size_t frames = len - delay;
  Array<T> aligned(Shape{batch, 1, frames});
  auto x = target.data();
  auto y = aligned.data();
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t t = 0; t < frames; ++t) y[b * frames + t] = x[b * len + t];
  }
  return ndgrad::smooth_l1_loss(ndgrad::slice_time(pred, delay, frames), aligned);
}

template <typename T>
Head<T>::Head(HeadSpec spec, std::size_t embedding_channels,
              std::size_t receptive_field, Rng& rng)
    : spec_(std::move(spec)), channels_(embedding_channels) {
  spec_.validate();
  if (channels_ == 0) {
    throw std::invalid_argument("head: embedding channels must be positive");
  }
  delay_ = spec_.delay.value_or(default_delay(receptive_field));
  warmup_ = spec_.warmup_mask ? receptive_field - 1 : 0;
  const std::size_t hidden = spec_.hidden_units;
  switch (spec_.kind) {
    case HeadKind::kTagging:
      tagging_.hidden = make_dense<T>(channels_, hidden, rng);
      tagging_.output = make_dense<T>(hidden, spec_.num_classes, rng);
      break;
    case HeadKind::kSpeakerId:
      speaker_.hidden1 = make_dense<T>(channels_, hidden, rng);
      speaker_.norm1 = make_norm<T>(hidden);
      speaker_.hidden2 = make_dense<T>(hidden, hidden, rng);
      speaker_.norm2 = make_norm<T>(hidden);
      speaker_.output = make_dense<T>(hidden, spec_.num_classes, rng);
      break;
    case HeadKind::kSpeechCommand: {
      std::size_t in = channels_;
      for (std::size_t i = 0; i < 3; ++i) {
        speech_.convs[i] =
            make_conv<T>(in, spec_.conv_channels, spec_.conv_widths[i], rng);
        speech_.norms[i] = make_norm<T>(spec_.conv_channels);
        in = spec_.conv_channels;
      }
      speech_.output = make_dense<T>(in, spec_.num_classes, rng);
      speech_.strides = spec_.conv_strides;
      speech_.dropout = spec_.dropout;
      break;
    }
    case HeadKind::kNextStep:
    case HeadKind::kDenoise:
    case HeadKind::kUpsample:
      regression_.hidden = make_conv<T>(channels_, hidden, spec_.filter_width, rng);
      regression_.output = make_conv<T>(hidden, 1, spec_.filter_width, rng);
      break;
  }
}

template <typename T>
std::size_t Head<T>::min_length() const {
  switch (spec_.kind) {
    case HeadKind::kSpeechCommand:
      return speech_command_min_length(spec_.conv_widths, spec_.conv_strides);
    case HeadKind::kNextStep:
      return warmup_ + 2;
    case HeadKind::kDenoise:
    case HeadKind::kUpsample:
      return delay_ + 1;
    default:
      return 1;
  }
}

template <typename T>
Array<T> Head<T>::forward(const Array<T>& emb, Mode mode, Rng& rng) {
  require_embedding(emb, "head");
  if (emb.dim(1) != channels_) {
    throw std::invalid_argument(
        std::string(to_string(spec_.kind)) + " head expects " +
        std::to_string(channels_) + " embedding channels, got " +
        std::to_string(emb.dim(1)));
  }
  if (emb.dim(2) < min_length()) {
    throw std::invalid_argument(std::string(to_string(spec_.kind)) +
                                " head needs at least " +
                                std::to_string(min_length()) + " frames, got " +
                                std::to_string(emb.dim(2)));
  }
  switch (spec_.kind) {
    case HeadKind::kTagging:
      return tagging_forward(emb, tagging_);
    case HeadKind::kSpeakerId:
      return speaker_forward(emb, speaker_, mode);
    case HeadKind::kSpeechCommand:
      return speech_command_forward(emb, speech_, mode, rng);
    case HeadKind::kNextStep:
      return next_step_forward(emb, regression_);
    case HeadKind::kDenoise:
      return denoise_forward(emb, regression_);
    case HeadKind::kUpsample:
      return upsample_forward(emb, regression_);
  }
  throw std::logic_error("unreachable head kind");
}

template <typename T>
std::vector<NamedParameter<T>> Head<T>::named_parameters(
    const std::string& prefix) const {
  std::vector<NamedParameter<T>> out;
  switch (spec_.kind) {
    case HeadKind::kTagging:
      push(out, prefix + "hidden", tagging_.hidden);
      push(out, prefix + "output", tagging_.output);
      break;
    case HeadKind::kSpeakerId:
      push(out, prefix + "hidden1", speaker_.hidden1);
      push(out, prefix + "norm1", speaker_.norm1);
      push(out, prefix + "hidden2", speaker_.hidden2);
      push(out, prefix + "norm2", speaker_.norm2);
      push(out, prefix + "output", speaker_.output);
      break;
    case HeadKind::kSpeechCommand:
      for (std::size_t i = 0; i < 3; ++i) {
        push(out, prefix + "conv" + std::to_string(i + 1), speech_.convs[i]);
        push(out, prefix + "norm" + std::to_string(i + 1), speech_.norms[i]);
      }
      push(out, prefix + "output", speech_.output);
      break;
    default:
      push(out, prefix + "hidden", regression_.hidden);
      push(out, prefix + "output", regression_.output);
      break;
  }
  return out;
}

template <typename T>
std::vector<NamedParameter<T>> Head<T>::named_buffers(
    const std::string& prefix) const {
  std::vector<NamedParameter<T>> out;
  if (spec_.kind == HeadKind::kSpeakerId) {
    push_stats(out, prefix + "norm1", speaker_.norm1);
    push_stats(out, prefix + "norm2", speaker_.norm2);
  } else if (spec_.kind == HeadKind::kSpeechCommand) {
    for (std::size_t i = 0; i < 3; ++i) {
      push_stats(out, prefix + "norm" + std::to_string(i + 1), speech_.norms[i]);
    }
  }
  return out;
}

template <typename T>
std::size_t Head<T>::parameter_count() const {
  std::size_t n = 0;
  for (const auto& p : named_parameters("")) n += p.value.size();
  return n;
}

std::size_t expected_parameter_count(const HeadSpec& spec,
                                     std::size_t embedding_channels) {
  const std::size_t c = embedding_channels, h = spec.hidden_units,
                    k = spec.num_classes;
  switch (spec.kind) {
    case HeadKind::kTagging:
      return (c * h + h) + (h * k + k);
    case HeadKind::kSpeakerId:
      return (c * h + h) + 2 * h + (h * h + h) + 2 * h + (h * k + k);
    case HeadKind::kSpeechCommand: {
      const std::size_t m = spec.conv_channels;
      std::size_t n = 0, in = c;
      for (std::size_t w : spec.conv_widths) {
        n += m * in * w + m + 2 * m;
        in = m;
      }
      return n + m * k + k;
    }
    default: {
      const std::size_t w = spec.filter_width;
      return (h * c * w + h) + (h * w + 1);
    }
  }
}

#define WAVETRUNK_INSTANTIATE_HEADS(T)                                         \
  template class Head<T>;                                                      \
  template Array<T> tagging_forward(const Array<T>&, const TaggingParams<T>&); \
  template Array<T> speaker_forward(const Array<T>&, SpeakerParams<T>&, Mode); \
  template Array<T> speech_command_forward(const Array<T>&,                    \
                                           SpeechCommandParams<T>&, Mode,      \
                                           Rng&);                              \
  template Array<T> regression_forward(const Array<T>&,                        \
                                       const RegressionParams<T>&);            \
  template Array<T> next_step_forward(const Array<T>&,                         \
                                      const RegressionParams<T>&);             \
  template Array<T> denoise_forward(const Array<T>&,                           \
                                    const RegressionParams<T>&);               \
  template Array<T> upsample_forward(const Array<T>&,                          \
                                     const RegressionParams<T>&);              \
  template Array<T> next_step_loss(const Array<T>&, const Array<T>&,           \
                                   std::size_t);                               \
  template Array<T> delayed_smooth_l1_loss(const Array<T>&, const Array<T>&,   \
                                           std::size_t);

WAVETRUNK_INSTANTIATE_HEADS(float)
WAVETRUNK_INSTANTIATE_HEADS(double)

#undef WAVETRUNK_INSTANTIATE_HEADS

}  // namespace wavetrunk::heads
