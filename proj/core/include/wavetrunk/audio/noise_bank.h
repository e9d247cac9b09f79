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


#ifndef WAVETRUNK_AUDIO_NOISE_BANK_H_
#define WAVETRUNK_AUDIO_NOISE_BANK_H_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "wavetrunk/audio/audio.h"

namespace wavetrunk::audio {

enum class NoiseKind { kWhite, kPink, kBabble };

std::string_view to_string(NoiseKind kind);

// Synthetic noise of `length` samples with unit-order amplitude. Babble is
// pink noise under a sum of slow syllable-rate envelopes.
std::vector<double> generate_noise(NoiseKind kind, std::size_t length,
                                   int sample_rate, Rng& rng);

// Noise sources for the denoise task and for augmentation: the three
// synthetic generators plus any WAV files found in a directory.
class NoiseBank {
 public:
  NoiseBank() = default;

  // Loads every *.wav under `dir` (sorted by path), resampled to
  // `sample_rate`. Silent files are skipped. Throws DataError if `dir` is
  // not a directory.
  static NoiseBank from_directory(const std::string& dir, int sample_rate);

  // A noise clip of exactly `length` samples and its kind tag. External
  // clips are looped when shorter than `length`.
  AudioClip draw(std::size_t length, int sample_rate, Rng& rng,
                 std::string* kind = nullptr) const;

  std::size_t external_count() const { return external_.size(); }

 private:
  std::vector<AudioClip> external_;
};

}  // namespace wavetrunk::audio

#endif  // WAVETRUNK_AUDIO_NOISE_BANK_H_
