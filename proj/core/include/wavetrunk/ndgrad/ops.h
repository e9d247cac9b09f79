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

// Differentiable operations. Every op validates shapes, computes its result
// eagerly and, when a tape is active and an operand requires a gradient,
// records its backward step. Shapes must match exactly; there is no
// broadcasting.

#ifndef WAVETRUNK_NDGRAD_OPS_H_
#define WAVETRUNK_NDGRAD_OPS_H_

#include <cstddef>

#include "wavetrunk/ndgrad/array.h"
#include "wavetrunk/ndgrad/random.h"

namespace wavetrunk::ndgrad {

enum class Mode { kTrain, kEval };

// Elementwise.
template <typename T>
Array<T> add(const Array<T>& a, const Array<T>& b);
template <typename T>
Array<T> mul(const Array<T>& a, const Array<T>& b);
template <typename T>
Array<T> scale(const Array<T>& a, T factor);
template <typename T>
Array<T> sigmoid(const Array<T>& a);
template <typename T>
Array<T> tanh(const Array<T>& a);
template <typename T>
Array<T> relu(const Array<T>& a);

// sigmoid(gate) * tanh(filter) as one node. Bit-identical to composing
// mul(sigmoid(gate), tanh(filter)) but keeps two fewer activations alive.
template <typename T>
Array<T> gated_activation(const Array<T>& gate, const Array<T>& filter);

// input [B, C_in, T], weight [C_out, C_in, K], bias [C_out] -> [B, C_out, T].
// Tap k looks (K - 1 - k) * dilation samples into the past; the input is
// left-padded with zeros so the output keeps length T.
template <typename T>
Array<T> causal_dilated_conv1d(const Array<T>& input, const Array<T>& weight,
                               const Array<T>& bias, std::size_t dilation);

// Valid (unpadded) convolution: T_out = (T - K) / stride + 1.
template <typename T>
Array<T> strided_conv1d(const Array<T>& input, const Array<T>& weight,
                        const Array<T>& bias, std::size_t stride);

std::size_t strided_output_length(std::size_t length, std::size_t width,
                                  std::size_t stride);

// [B, C, T] -> [B, C], mean over time.
template <typename T>
Array<T> global_avg_pool_time(const Array<T>& input);

// input [B, F], weight [F, U], bias [U] -> [B, U].
template <typename T>
Array<T> dense(const Array<T>& input, const Array<T>& weight,
               const Array<T>& bias);

template <typename T>
struct BatchNormState {
  Array<T> running_mean;  // [C], starts at 0
  Array<T> running_var;   // [C], starts at 1
  T momentum = T(0.1);
  T epsilon = T(1e-5);

  explicit BatchNormState(std::size_t channels = 1);
};

// Per-channel normalization of [B, C] or [B, C, T] input. Train mode uses
// batch statistics (biased variance) and folds them into the running stats
// (unbiased variance); eval mode uses the running stats.
template <typename T>
Array<T> batch_norm(const Array<T>& input, const Array<T>& gamma,
                    const Array<T>& beta, BatchNormState<T>& state, Mode mode);

// Inverted dropout; identity in eval mode.
template <typename T>
Array<T> dropout(const Array<T>& input, double rate, Mode mode, Rng& rng);

// [B, C, T] -> [B, C, length], frames [start, start + length).
template <typename T>
Array<T> slice_time(const Array<T>& input, std::size_t start,
                    std::size_t length);

}  // namespace wavetrunk::ndgrad

#endif  // WAVETRUNK_NDGRAD_OPS_H_
