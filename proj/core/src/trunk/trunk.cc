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

#include "wavetrunk/trunk.h"

#include <cstdio>
#include <stdexcept>
#include <string>

#include "wavetrunk/ndgrad/init.h"
#include "wavetrunk/ndgrad/ops.h"

namespace wavetrunk {

using ndgrad::Array;
using ndgrad::Shape;

void TrunkConfig::validate() const {
  if (num_blocks == 0 || layers_per_block == 0 || channels == 0) {
    throw std::invalid_argument(
        "trunk: blocks, layers and channels must all be positive");
  }
  if (layers_per_block > 30) {
    throw std::invalid_argument("trunk: layers_per_block must be <= 30");
  }
}

std::size_t TrunkConfig::dilation(std::size_t layer) const {
  if (layer == 0 || layer > num_layers()) {
    throw std::out_of_range("trunk: layer index " + std::to_string(layer) +
                            " outside [1, " + std::to_string(num_layers()) + "]");
  }
  return std::size_t{1} << ((layer - 1) % layers_per_block);
}

std::size_t receptive_field_prefix(const TrunkConfig& cfg, std::size_t blocks) {
  cfg.validate();
  return 1 + blocks * ((std::size_t{1} << cfg.layers_per_block) - 1);
}

std::size_t receptive_field(const TrunkConfig& cfg) {
  return receptive_field_prefix(cfg, cfg.num_blocks);
}

template <typename T>
TrunkParams<T> TrunkParams<T>::zeros(const TrunkConfig& cfg) {
  cfg.validate();
  const std::size_t c = cfg.channels;
  TrunkParams p;
  p.input_weight = Array<T>(Shape{c, 1, 1}, true);
  p.input_bias = Array<T>(Shape{c}, true);
  p.layers.reserve(cfg.num_layers());
  for (std::size_t l = 0; l < cfg.num_layers(); ++l) {
    p.layers.push_back(ResidualAtomParams<T>{
        Array<T>(Shape{c, c, kTrunkKernelWidth}, true), Array<T>(Shape{c}, true),
        Array<T>(Shape{c, c, kTrunkKernelWidth}, true), Array<T>(Shape{c}, true)});
  }
  return p;
}

template <typename T>
TrunkParams<T> TrunkParams<T>::init(const TrunkConfig& cfg, Rng& rng) {
  TrunkParams p = zeros(cfg);
  ndgrad::he_uniform(p.input_weight, 1, rng);
  const std::size_t fan_in = cfg.channels * kTrunkKernelWidth;
  for (auto& layer : p.layers) {
    ndgrad::he_uniform(layer.filter_weight, fan_in, rng);
    ndgrad::he_uniform(layer.gate_weight, fan_in, rng);
  }
  return p;
}

template <typename T>
std::vector<ndgrad::NamedParameter<T>> TrunkParams<T>::named_parameters() const {
  std::vector<ndgrad::NamedParameter<T>> out;
  out.push_back({"trunk.input.weight", input_weight});
  out.push_back({"trunk.input.bias", input_bias});
  char prefix[32];
  for (std::size_t l = 0; l < layers.size(); ++l) {
    std::snprintf(prefix, sizeof(prefix), "trunk.layer%02zu.", l + 1);
    const std::string p(prefix);
    out.push_back({p + "filter.weight", layers[l].filter_weight});
    out.push_back({p + "filter.bias", layers[l].filter_bias});
    out.push_back({p + "gate.weight", layers[l].gate_weight});
    out.push_back({p + "gate.bias", layers[l].gate_bias});
  }
  return out;
}

template <typename T>
std::size_t TrunkParams<T>::parameter_count() const {
  std::size_t n = 0;
  for (const auto& p : named_parameters()) n += p.value.size();
  return n;
}

template <typename T>
void TrunkParams<T>::set_requires_grad(bool value) {
  for (auto& p : named_parameters()) p.value.set_requires_grad(value);
}

template <typename T>
Array<T> trunk_forward(const Array<T>& x, const TrunkParams<T>& params,
                       const TrunkConfig& cfg) {
  cfg.validate();
  if (x.rank() != 3 || x.dim(1) != 1) {
    throw std::invalid_argument("trunk_forward: input must be [B,1,T], got " +
                                ndgrad::shape_string(x.shape()));
  }
  const std::size_t c = cfg.channels;
  if (params.input_weight.shape() != Shape{c, 1, 1} ||
      params.layers.size() != cfg.num_layers()) {
    throw std::invalid_argument(
        "trunk_forward: parameters do not match config (" +
        std::to_string(cfg.num_layers()) + " layers of " + std::to_string(c) +
        " channels expected)");
  }
  for (const auto& layer : params.layers) {
    if (layer.filter_weight.shape() != Shape{c, c, kTrunkKernelWidth} ||
        layer.gate_weight.shape() != Shape{c, c, kTrunkKernelWidth}) {
      throw std::invalid_argument(
          "trunk_forward: residual atom weights must be " +
          ndgrad::shape_string(Shape{c, c, kTrunkKernelWidth}) + ", got " +
          ndgrad::shape_string(layer.filter_weight.shape()));
    }
  }
  Array<T> h = ndgrad::causal_dilated_conv1d(x, params.input_weight,
                                             params.input_bias, 1);
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    const auto& atom = params.layers[l];
    const std::size_t d = cfg.dilation(l + 1);
    Array<T> gate =
        ndgrad::causal_dilated_conv1d(h, atom.gate_weight, atom.gate_bias, d);
    Array<T> filter =
        ndgrad::causal_dilated_conv1d(h, atom.filter_weight, atom.filter_bias, d);
    h = ndgrad::add(h, ndgrad::gated_activation(gate, filter));
  }
  return h;
}

template struct TrunkParams<float>;
template struct TrunkParams<double>;
template Array<float> trunk_forward(const Array<float>&,
                                    const TrunkParams<float>&,
                                    const TrunkConfig&);
template Array<double> trunk_forward(const Array<double>&,
                                     const TrunkParams<double>&,
                                     const TrunkConfig&);

}  // namespace wavetrunk
