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


#ifndef WAVETRUNK_TRAIN_DATA_H_
#define WAVETRUNK_TRAIN_DATA_H_

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "wavetrunk/audio/audio.h"
#include "wavetrunk/audio/noise_bank.h"
#include "wavetrunk/heads/heads.h"

namespace wavetrunk::train {

// Pitch and noise augmentation of supervised examples.
struct AugmentConfig {
  bool enabled = false;
  double pitch_prob = 0.5;
  double pitch_range = 2.0;  // semitones, drawn uniformly from +-range
  double noise_prob = 0.5;
  std::array<double, 2> snr_db{10.0, 15.0};

  void validate() const;
};

struct DataConfig {
  int sample_rate = audio::kCanonicalRate;
  double pre_emphasis = 0.97;
  double rms_target = 0.1;  // 0 disables RMS normalization
  std::array<double, 2> denoise_snr_db{10.0, 15.0};
  std::string noise_bank;  // optional directory of WAV noise
  AugmentConfig augment;

  void validate() const;
};

struct Dataset {
  std::vector<audio::AudioClip> clips;
  std::vector<std::string> vocabulary;

  std::size_t size() const { return clips.size(); }
};

// Loads the rows of `split` (every row when `split` is empty), resampled to
// `sample_rate`. Labels map through `vocabulary`, which is built from the
// manifest when empty. Throws DataError.
Dataset load_dataset(const std::string& manifest_path, int sample_rate,
                     std::vector<std::string> vocabulary = {},
                     const std::string& split = "train",
                     bool require_labels = false);

// Crop or pad, optional augmentation, RMS normalization, pre-emphasis and
// peak limiting, in that order.
audio::AudioClip preprocess_clip(const audio::AudioClip& clip,
                                 const DataConfig& data, double clip_seconds,
                                 bool augment, const audio::NoiseBank& noise,
                                 Rng& rng);

// One network input with its regression target or class label.
struct Example {
  std::vector<double> input;
  std::vector<double> target;  // clean signal for denoise/upsample
  std::size_t label = 0;
};

// Preprocesses `clip` and synthesizes the task's input/target pair.
Example prepare_example(heads::HeadKind kind, const audio::AudioClip& clip,
                        const DataConfig& data, double clip_seconds,
                        bool augment, const audio::NoiseBank& noise, Rng& rng);

}  // namespace wavetrunk::train

#endif  // WAVETRUNK_TRAIN_DATA_H_
