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

// Task heads consuming trunk embeddings [B, C, T].
//
// Classifiers (tagging, speaker_id, speech_command) produce logits [B, K].
// Regressors (next_step, denoise, upsample) produce one value per frame,
// [B, 1, T], through two causal convolutions with a ReLU between them.

#ifndef WAVETRUNK_HEADS_HEADS_H_
#define WAVETRUNK_HEADS_HEADS_H_

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wavetrunk/ndgrad/adam.h"
#include "wavetrunk/ndgrad/array.h"
#include "wavetrunk/ndgrad/ops.h"
#include "wavetrunk/ndgrad/random.h"

namespace wavetrunk::heads {

enum class HeadKind {
  kTagging,
  kSpeakerId,
  kSpeechCommand,
  kNextStep,
  kDenoise,
  kUpsample,
};

std::string_view to_string(HeadKind kind);
// Accepts tagging, speaker_id, speech_command, next_step, denoise, upsample.
HeadKind parse_head_kind(std::string_view name);
bool is_classification(HeadKind kind);

struct HeadSpec {
  HeadKind kind = HeadKind::kTagging;
  std::size_t num_classes = 0;
  double lr = 0.0;

  // tagging: 512, speaker_id: 1024, regressors: 128.
  std::size_t hidden_units = 0;

  // speech_command only.
  std::size_t conv_channels = 64;
  std::array<std::size_t, 3> conv_widths{100, 50, 25};
  std::array<std::size_t, 3> conv_strides{16, 8, 4};
  double dropout = 0.5;

  // Regressor kernel width: 1 for next_step, 11 for denoise and upsample.
  std::size_t filter_width = 1;
  // Target delay for denoise/upsample; unset means floor((tau - 1) / 2).
  std::optional<std::size_t> delay;
  // next_step: drop the first tau - 1 frames from the loss.
  bool warmup_mask = false;

  static HeadSpec defaults(HeadKind kind);
  void validate() const;
};

template <typename T>
struct DenseLayer {
  ndgrad::Array<T> weight;  // [in, out]
  ndgrad::Array<T> bias;    // [out]
};

template <typename T>
struct ConvLayer {
  ndgrad::Array<T> weight;  // [out, in, width]
  ndgrad::Array<T> bias;    // [out]
};

template <typename T>
struct BatchNormLayer {
  ndgrad::Array<T> gamma;
  ndgrad::Array<T> beta;
  ndgrad::BatchNormState<T> state;
};

template <typename T>
struct TaggingParams {
  DenseLayer<T> hidden;
  DenseLayer<T> output;
};

template <typename T>
struct SpeakerParams {
  DenseLayer<T> hidden1;
  BatchNormLayer<T> norm1;
  DenseLayer<T> hidden2;
  BatchNormLayer<T> norm2;
  DenseLayer<T> output;
};

template <typename T>
struct SpeechCommandParams {
  std::array<ConvLayer<T>, 3> convs;
  std::array<BatchNormLayer<T>, 3> norms;
  DenseLayer<T> output;
  std::array<std::size_t, 3> strides{};
  double dropout = 0.5;
};

template <typename T>
struct RegressionParams {
  ConvLayer<T> hidden;
  ConvLayer<T> output;
};

// Pool over time -> dense(512) -> ReLU -> dense(num_classes).
template <typename T>
ndgrad::Array<T> tagging_forward(const ndgrad::Array<T>& emb,
                                 const TaggingParams<T>& params);

// Pool -> [dense(1024) -> batch_norm -> ReLU] x 2 -> dense(num_classes).
template <typename T>
ndgrad::Array<T> speaker_forward(const ndgrad::Array<T>& emb,
                                 SpeakerParams<T>& params, ndgrad::Mode mode);

// Three strided convs, each followed by batch_norm -> dropout -> ReLU, then
// pool -> dense(num_classes).
template <typename T>
ndgrad::Array<T> speech_command_forward(const ndgrad::Array<T>& emb,
                                        SpeechCommandParams<T>& params,
                                        ndgrad::Mode mode, Rng& rng);

// Shortest input the speech-command conv stack accepts.
std::size_t speech_command_min_length(std::span<const std::size_t> widths,
                                      std::span<const std::size_t> strides);

// Causal conv(hidden) -> ReLU -> causal conv(1); used by next_step (width 1),
// denoise and upsample (width 11).
template <typename T>
ndgrad::Array<T> regression_forward(const ndgrad::Array<T>& emb,
                                    const RegressionParams<T>& params);

template <typename T>
ndgrad::Array<T> next_step_forward(const ndgrad::Array<T>& emb,
                                   const RegressionParams<T>& params);
template <typename T>
ndgrad::Array<T> denoise_forward(const ndgrad::Array<T>& emb,
                                 const RegressionParams<T>& params);
template <typename T>
ndgrad::Array<T> upsample_forward(const ndgrad::Array<T>& emb,
                                  const RegressionParams<T>& params);

// MSE between pred[t] and input[t + 1] over t in [warmup, T - 2]. The input
// is a constant target; no gradient flows into it.
template <typename T>
ndgrad::Array<T> next_step_loss(const ndgrad::Array<T>& pred,
                                const ndgrad::Array<T>& input,
                                std::size_t warmup = 0);

// Smooth-L1 between pred[t] and target[t - delay] over t in [delay, T - 1].
// Frames before `delay` have no aligned target and are left out.
template <typename T>
ndgrad::Array<T> delayed_smooth_l1_loss(const ndgrad::Array<T>& pred,
                                        const ndgrad::Array<T>& target,
                                        std::size_t delay);

// Default target delay for a trunk with receptive field `tau`.
std::size_t default_delay(std::size_t tau);

// A head of any kind with its parameters and batch-norm state.
template <typename T>
class Head {
 public:
  Head() = default;
  // Fresh He-uniform initialization. `receptive_field` fixes the default
  // delay and the next-step warm-up length.
  Head(HeadSpec spec, std::size_t embedding_channels,
       std::size_t receptive_field, Rng& rng);

  const HeadSpec& spec() const { return spec_; }
  HeadKind kind() const { return spec_.kind; }
  std::size_t embedding_channels() const { return channels_; }
  std::size_t delay() const { return delay_; }
  std::size_t warmup() const { return warmup_; }

  // Logits [B, K] or predictions [B, 1, T].
  ndgrad::Array<T> forward(const ndgrad::Array<T>& emb, ndgrad::Mode mode,
                           Rng& rng);

  // Shortest embedding length this head accepts.
  std::size_t min_length() const;

  // Parameters in a stable order, names prefixed with `prefix`.
  std::vector<ndgrad::NamedParameter<T>> named_parameters(
      const std::string& prefix) const;
  // Running statistics of batch-norm layers (not trained by the optimizer).
  std::vector<ndgrad::NamedParameter<T>> named_buffers(
      const std::string& prefix) const;
  std::size_t parameter_count() const;

 private:
  HeadSpec spec_;
  std::size_t channels_ = 0;
  std::size_t delay_ = 0;
  std::size_t warmup_ = 0;
  TaggingParams<T> tagging_;
  SpeakerParams<T> speaker_;
  SpeechCommandParams<T> speech_;
  RegressionParams<T> regression_;
};

// Closed-form parameter count for a head spec on `embedding_channels` inputs.
std::size_t expected_parameter_count(const HeadSpec& spec,
                                     std::size_t embedding_channels);

extern template class Head<float>;
extern template class Head<double>;

}  // namespace wavetrunk::heads

#endif  // WAVETRUNK_HEADS_HEADS_H_
