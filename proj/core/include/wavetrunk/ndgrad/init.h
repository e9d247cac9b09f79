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

#ifndef WAVETRUNK_NDGRAD_INIT_H_
#define WAVETRUNK_NDGRAD_INIT_H_

#include <cmath>
#include <cstddef>

#include "wavetrunk/ndgrad/array.h"
#include "wavetrunk/ndgrad/random.h"

namespace wavetrunk::ndgrad {

// Fills with U(-sqrt(6 / fan_in), sqrt(6 / fan_in)).
template <typename T>
void he_uniform(Array<T>& a, std::size_t fan_in, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
  for (T& v : a.data()) v = static_cast<T>((2.0 * uniform01(rng) - 1.0) * bound);
}

template <typename T>
Array<T> he_uniform_array(Shape shape, std::size_t fan_in, Rng& rng) {
  Array<T> a(std::move(shape), true);
  he_uniform(a, fan_in, rng);
  return a;
}

}  // namespace wavetrunk::ndgrad

#endif  // WAVETRUNK_NDGRAD_INIT_H_
