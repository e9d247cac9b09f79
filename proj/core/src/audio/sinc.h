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


#ifndef WAVETRUNK_SRC_AUDIO_SINC_H_
#define WAVETRUNK_SRC_AUDIO_SINC_H_

#include <cmath>
#include <numbers>

namespace wavetrunk::audio {

inline double sinc(double x) {
  if (std::abs(x) < 1e-12) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

// Low-pass kernel at `t` input samples: cutoff as a fraction of Nyquist,
// Hann window over [-half_width, half_width].
inline double windowed_sinc(double t, double cutoff, double half_width) {
  if (std::abs(t) >= half_width) return 0.0;
  const double window = 0.5 + 0.5 * std::cos(std::numbers::pi * t / half_width);
  return cutoff * sinc(cutoff * t) * window;
}

}  // namespace wavetrunk::audio

#endif  // WAVETRUNK_SRC_AUDIO_SINC_H_
