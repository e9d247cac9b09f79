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


// Labeled and unlabeled synthetic corpora for tests and demos. Class c owns a
// log-spaced frequency band; its clips are tones (c % 3 == 0), linear chirps
// (c % 3 == 1) or amplitude-modulated band noise (c % 3 == 2) inside it.

#ifndef WAVETRUNK_AUDIO_SYNTH_H_
#define WAVETRUNK_AUDIO_SYNTH_H_

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "wavetrunk/audio/audio.h"

namespace wavetrunk::audio {

struct SynthConfig {
  std::size_t classes = 4;
  std::size_t clips_per_class = 8;
  std::size_t unlabeled_clips = 32;
  double seconds = 2.0;
  int sample_rate = kCanonicalRate;
  double snr_db = 20.0;  // white background noise
  double min_hz = 200.0;
  double max_hz = 6000.0;
  std::uint64_t seed = 0;

  void validate() const;
};

enum class SynthKind { kTone, kChirp, kAmNoise };

SynthKind class_kind(std::size_t label);
// [low, high] Hz of class `label`.
std::pair<double, double> class_band(const SynthConfig& cfg, std::size_t label);

AudioClip synth_clip(const SynthConfig& cfg, std::size_t label, Rng& rng);

struct SynthCorpus {
  std::vector<AudioClip> labeled;  // class-major order
  std::vector<AudioClip> unlabeled;
};

SynthCorpus synthesize(const SynthConfig& cfg);

// Writes labeled/*.wav with labeled.csv (path,label,split) and
// unlabeled/*.wav with unlabeled.csv (path) under `dir`, as PCM16.
void write_corpus(const SynthCorpus& corpus, const std::string& dir);

}  // namespace wavetrunk::audio

#endif  // WAVETRUNK_AUDIO_SYNTH_H_
