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

#ifndef WAVETRUNK_NDGRAD_ADAM_H_
#define WAVETRUNK_NDGRAD_ADAM_H_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "wavetrunk/ndgrad/array.h"

namespace wavetrunk::ndgrad {

struct AdamConfig {
  double lr = 1e-3;
  double beta0 = 0.9;
  double beta1 = 0.99;
  double epsilon = 1e-8;
  std::uint64_t step_count = 0;

  void validate() const;
};

// Step decay: lr(epoch) = base * multiplier^floor(epoch / epochs_per_step).
struct LrSchedule {
  std::uint32_t epochs_per_step = 5;
  double multiplier = 0.95;

  void validate() const;
  double effective_lr(double base_lr, std::uint64_t epoch) const;
};

template <typename T>
struct AdamMoments {
  std::vector<T> first;
  std::vector<T> second;
};

template <typename T>
struct NamedParameter {
  std::string name;
  Array<T> value;
};

// One bias-corrected Adam update of params[i] with grads[i] at learning rate
// `lr`. Moments are zero-initialized on first use; cfg.step_count is
// incremented once per call.
template <typename T>
void adam_step(std::span<Array<T>> params, std::span<const Array<T>> grads,
               std::vector<AdamMoments<T>>& state, AdamConfig& cfg, double lr);

// A parameter group with its own Adam state. Gradients are read from the
// parameters' own buffers; a parameter that received no gradient is updated
// as if its gradient were zero.
template <typename T>
class AdamOptimizer {
 public:
  AdamOptimizer() = default;
  AdamOptimizer(std::vector<NamedParameter<T>> params, AdamConfig cfg);

  void step(double lr);
  void zero_grad();

  const AdamConfig& config() const { return cfg_; }
  AdamConfig& config() { return cfg_; }
  const std::vector<NamedParameter<T>>& parameters() const { return params_; }
  const std::vector<AdamMoments<T>>& moments() const { return moments_; }

  // Restores moments for every parameter (name order as in parameters()).
  void set_state(std::vector<AdamMoments<T>> moments, std::uint64_t step_count);

 private:
  std::vector<NamedParameter<T>> params_;
  std::vector<AdamMoments<T>> moments_;
  AdamConfig cfg_;
};

extern template class AdamOptimizer<float>;
extern template class AdamOptimizer<double>;

}  // namespace wavetrunk::ndgrad

#endif  // WAVETRUNK_NDGRAD_ADAM_H_
