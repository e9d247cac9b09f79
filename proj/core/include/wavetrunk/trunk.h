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

// Shared WaveNet-style feature extractor.
//
// A width-1 input projection lifts the waveform to `channels` features, then
// num_blocks * layers_per_block residual atoms follow:
//
//   h = sigmoid(W_gate (*)_d x) * tanh(W_filter (*)_d x)
//   x = x + h
//
// where (*)_d is a width-2 causal convolution with dilation
// d = 2^((layer - 1) mod layers_per_block). There are no skip connections and
// no output nonlinearity; heads consume the last residual stream directly.

#ifndef WAVETRUNK_TRUNK_H_
#define WAVETRUNK_TRUNK_H_

#include <cstddef>
#include <string>
#include <vector>

#include "wavetrunk/ndgrad/adam.h"
#include "wavetrunk/ndgrad/array.h"
#include "wavetrunk/ndgrad/random.h"

namespace wavetrunk {

struct TrunkConfig {
  std::size_t num_blocks = 3;
  std::size_t layers_per_block = 6;
  std::size_t channels = 64;

  void validate() const;
  std::size_t num_layers() const { return num_blocks * layers_per_block; }
  // Dilation of 1-based layer index `layer`.
  std::size_t dilation(std::size_t layer) const;

  bool operator==(const TrunkConfig&) const = default;
};

inline constexpr std::size_t kTrunkKernelWidth = 2;

// 1 + blocks * (2^layers_per_block - 1).
std::size_t receptive_field(const TrunkConfig& cfg);
// Receptive field after the first `blocks` blocks.
std::size_t receptive_field_prefix(const TrunkConfig& cfg, std::size_t blocks);

template <typename T>
struct ResidualAtomParams {
  ndgrad::Array<T> filter_weight;  // [C, C, 2]
  ndgrad::Array<T> filter_bias;    // [C]
  ndgrad::Array<T> gate_weight;    // [C, C, 2]
  ndgrad::Array<T> gate_bias;      // [C]
};

template <typename T>
struct TrunkParams {
  ndgrad::Array<T> input_weight;  // [C, 1, 1]
  ndgrad::Array<T> input_bias;    // [C]
  std::vector<ResidualAtomParams<T>> layers;

  // He-uniform weights, zero biases.
  static TrunkParams init(const TrunkConfig& cfg, Rng& rng);
  static TrunkParams zeros(const TrunkConfig& cfg);

  // Stable names: trunk.input.weight, trunk.layer03.gate.bias, ...
  std::vector<ndgrad::NamedParameter<T>> named_parameters() const;
  std::size_t parameter_count() const;
  void set_requires_grad(bool value);
};

// x [B, 1, T] -> embeddings [B, channels, T].
template <typename T>
ndgrad::Array<T> trunk_forward(const ndgrad::Array<T>& x,
                               const TrunkParams<T>& params,
                               const TrunkConfig& cfg);

extern template struct TrunkParams<float>;
extern template struct TrunkParams<double>;

}  // namespace wavetrunk

#endif  // WAVETRUNK_TRUNK_H_
