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

#ifndef WAVETRUNK_NDGRAD_RANDOM_H_
#define WAVETRUNK_NDGRAD_RANDOM_H_

#include <cstdint>
#include <initializer_list>
#include <random>

namespace wavetrunk {

using Rng = std::mt19937_64;

// Mixes a base seed with stream coordinates (task, epoch, step, ...) into an
// independent seed. Lets every random draw be recomputed from its position in
// a run, which is what makes resumed training match an uninterrupted one.
inline std::uint64_t derive_seed(std::uint64_t base,
                                 std::initializer_list<std::uint64_t> coords) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  std::uint64_t h = mix(base);
  for (std::uint64_t c : coords) h = mix(h ^ mix(c));
  return h;
}

// Uniform double in [0, 1) from the top 53 bits; independent of the standard
// library's distribution implementations.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace wavetrunk

namespace wavetrunk::ndgrad {
using wavetrunk::Rng;
}  // namespace wavetrunk::ndgrad

#endif  // WAVETRUNK_NDGRAD_RANDOM_H_
