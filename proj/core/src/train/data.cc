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


#include "wavetrunk/train/data.h"

#include <cmath>
#include <stdexcept>

#include "wavetrunk/audio/manifest.h"
#include "wavetrunk/audio/wav.h"
#include "wavetrunk/errors.h"

namespace wavetrunk::train {
namespace {

void check_snr_range(const std::array<double, 2>& r, const char* what) {
  if (!std::isfinite(r[0]) || !std::isfinite(r[1]) || r[0] > r[1]) {
    throw ConfigError(std::string(what) + " must be a finite [low, high] range");
  }
}

void check_probability(double p, const char* what) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ConfigError(std::string(what) + " must be in [0, 1]");
  }
}

double uniform_in(const std::array<double, 2>& r, Rng& rng) {
  return r[0] + (r[1] - r[0]) * uniform01(rng);
}

}  // namespace

void AugmentConfig::validate() const {
  check_probability(pitch_prob, "augment.pitch_prob");
  check_probability(noise_prob, "augment.noise_prob");
  if (!(pitch_range >= 0.0 && pitch_range <= 12.0)) {
    throw ConfigError("augment.pitch_range must be in [0, 12] semitones");
  }
  check_snr_range(snr_db, "augment.snr_range");
}

void DataConfig::validate() const {
  if (sample_rate <= 0) throw ConfigError("data.sample_rate must be positive");
  if (!(pre_emphasis >= 0.0 && pre_emphasis < 1.0)) {
    throw ConfigError("data.pre_emphasis must be in [0, 1)");
  }
  if (!(rms_target >= 0.0) || !std::isfinite(rms_target)) {
    throw ConfigError("data.rms_target must be non-negative");
  }
  check_snr_range(denoise_snr_db, "data.denoise_snr_range");
  augment.validate();
}

Dataset load_dataset(const std::string& manifest_path, int sample_rate,
                     std::vector<std::string> vocabulary,
                     const std::string& split, bool require_labels) {
  audio::Manifest manifest = audio::Manifest::load(manifest_path);
  if (!split.empty()) manifest = manifest.filter_split(split);
  if (manifest.size() == 0) {
    throw DataError(manifest_path + ": no rows" +
                    (split.empty() ? std::string() : " in split '" + split + "'"));
  }
  if (require_labels && !manifest.labeled()) {
    throw DataError(manifest_path + ": every row needs a label for a classification task");
  }
  Dataset data;
  data.vocabulary = vocabulary.empty() && manifest.labeled()
                        ? audio::build_vocabulary(manifest)
                        : std::move(vocabulary);
  for (const auto& row : manifest.rows()) {
    audio::AudioClip clip = audio::resample(audio::load_wav(row.path), sample_rate);
    clip.source_id = row.path;
    if (row.label && !data.vocabulary.empty()) {
      clip.label = audio::label_index(data.vocabulary, *row.label);
    }
    data.clips.push_back(std::move(clip));
  }
  return data;
}

audio::AudioClip preprocess_clip(const audio::AudioClip& clip,
                                 const DataConfig& data, double clip_seconds,
                                 bool augment, const audio::NoiseBank& noise,
                                 Rng& rng) {
  audio::AudioClip x = clip.sample_rate == data.sample_rate
                           ? clip
                           : audio::resample(clip, data.sample_rate);
  x = audio::crop_or_pad(x, clip_seconds, rng);
  if (augment && data.augment.enabled) {
    if (uniform01(rng) < data.augment.pitch_prob) {
      x = audio::random_pitch_shift(x, data.augment.pitch_range, rng);
    }
    if (uniform01(rng) < data.augment.noise_prob && audio::power(x.samples) > 0.0) {
      std::string kind;
      audio::AudioClip n = noise.draw(x.size(), x.sample_rate, rng, &kind);
      x = audio::mix_at_snr(x, n, uniform_in(data.augment.snr_db, rng), rng, kind).noisy;
    }
  }
  if (data.rms_target > 0.0) x = audio::rms_normalize(x, data.rms_target);
  x = audio::pre_emphasis(x, data.pre_emphasis);
  return audio::limit_peak(x);
}

Example prepare_example(heads::HeadKind kind, const audio::AudioClip& clip,
                        const DataConfig& data, double clip_seconds,
                        bool augment, const audio::NoiseBank& noise, Rng& rng) {
  const bool classifier = heads::is_classification(kind);
  audio::AudioClip x =
      preprocess_clip(clip, data, clip_seconds, augment && classifier, noise, rng);
  Example ex;
  if (classifier) {
    if (!clip.label) {
      throw DataError("clip '" + clip.source_id + "' has no label");
    }
    ex.label = *clip.label;
    ex.input = std::move(x.samples);
    return ex;
  }
  switch (kind) {
    case heads::HeadKind::kNextStep:
      ex.input = std::move(x.samples);
      break;
    case heads::HeadKind::kDenoise:
      if (audio::power(x.samples) > 0.0) {
        std::string noise_kind;
        audio::AudioClip n = noise.draw(x.size(), x.sample_rate, rng, &noise_kind);
        audio::NoisySample s = audio::mix_at_snr(
            x, n, uniform_in(data.denoise_snr_db, rng), rng, noise_kind);
        ex.input = std::move(s.noisy.samples);
        ex.target = std::move(s.clean.samples);
      } else {
        ex.input = x.samples;
        ex.target = std::move(x.samples);
      }
      break;
    case heads::HeadKind::kUpsample: {
      auto [in, target] = audio::make_upsample_pair(x);
      ex.input = std::move(in.samples);
      ex.target = std::move(target.samples);
      break;
    }
    default:
      throw std::logic_error("unhandled head kind");
  }
  return ex;
}

}  // namespace wavetrunk::train
