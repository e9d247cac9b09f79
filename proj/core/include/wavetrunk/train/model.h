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


#ifndef WAVETRUNK_TRAIN_MODEL_H_
#define WAVETRUNK_TRAIN_MODEL_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "wavetrunk/heads/heads.h"
#include "wavetrunk/ndgrad/adam.h"
#include "wavetrunk/trunk.h"

namespace wavetrunk::train {

struct TaskHead {
  std::string name;  // letters, digits, '_' and '-'
  heads::HeadSpec spec;
  // Class vocabulary of classification heads; index = class id.
  std::vector<std::string> labels;
};

// Everything needed to rebuild a model's structure.
struct ModelSpec {
  TrunkConfig trunk;
  std::vector<TaskHead> heads;

  void validate() const;
  std::string to_json() const;
  // Throws ConfigError on malformed input.
  static ModelSpec from_json(const std::string& text);
};

// Shared trunk plus named task heads, in float precision.
//
// Tensor names: trunk parameters as in TrunkParams::named_parameters();
// head tensors as "heads.<task>.<layer>.<param>".
class Model {
 public:
  Model() = default;
  // Fresh initialization; the trunk and each head draw from separate
  // streams derived from `seed`.
  Model(ModelSpec spec, std::uint64_t seed);

  const ModelSpec& spec() const { return spec_; }
  const TrunkConfig& trunk_config() const { return spec_.trunk; }
  std::size_t receptive_field() const;

  TrunkParams<float>& trunk() { return trunk_; }
  const TrunkParams<float>& trunk() const { return trunk_; }
  std::size_t num_heads() const { return heads_.size(); }
  heads::Head<float>& head(std::size_t i) { return heads_.at(i); }
  const heads::Head<float>& head(std::size_t i) const { return heads_.at(i); }
  const std::string& head_name(std::size_t i) const { return spec_.heads.at(i).name; }
  // Throws ConfigError when no head has this name.
  std::size_t head_index(const std::string& name) const;

  // Embeddings [B, C, T] for waveforms [B, 1, T].
  ndgrad::Array<float> embed(const ndgrad::Array<float>& x) const;

  std::vector<ndgrad::NamedParameter<float>> trunk_parameters() const;
  std::vector<ndgrad::NamedParameter<float>> head_parameters(std::size_t i) const;
  // Trainable parameters followed by batch-norm running statistics.
  std::vector<ndgrad::NamedParameter<float>> named_tensors() const;

  void set_trunk_trainable(bool trainable);

 private:
  ModelSpec spec_;
  TrunkParams<float> trunk_;
  std::vector<heads::Head<float>> heads_;
};

}  // namespace wavetrunk::train

#endif  // WAVETRUNK_TRAIN_MODEL_H_
