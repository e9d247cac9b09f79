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


#include "wavetrunk/audio/synth.h"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "wavetrunk/audio/noise_bank.h"
#include "wavetrunk/audio/wav.h"
#include "wavetrunk/errors.h"

namespace wavetrunk::audio {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr std::uint64_t kUnlabeledStream = 1ULL << 32;

double uniform_in(double lo, double hi, Rng& rng) {
  return lo + (hi - lo) * uniform01(rng);
}

}  // namespace

void SynthConfig::validate() const {
  if (classes == 0) throw ConfigError("synth: classes must be positive");
  if (!(seconds > 0.0)) throw ConfigError("synth: seconds must be positive");
  if (sample_rate <= 0) throw ConfigError("synth: sample rate must be positive");
  if (!(min_hz > 0.0 && min_hz < max_hz && max_hz < sample_rate / 2.0)) {
    throw ConfigError("synth: need 0 < min_hz < max_hz < sample_rate / 2");
  }
  if (!std::isfinite(snr_db)) throw ConfigError("synth: snr_db must be finite");
}

SynthKind class_kind(std::size_t label) {
  return static_cast<SynthKind>(label % 3);
}

std::pair<double, double> class_band(const SynthConfig& cfg, std::size_t label) {
  const double ratio = cfg.max_hz / cfg.min_hz;
  const double k = static_cast<double>(cfg.classes);
  const double lo = cfg.min_hz * std::pow(ratio, label / k);
  const double hi = cfg.min_hz * std::pow(ratio, (label + 1) / k);
  const double r = hi / lo;
  return {lo * std::pow(r, 0.1), lo * std::pow(r, 0.9)};
}

AudioClip synth_clip(const SynthConfig& cfg, std::size_t label, Rng& rng) {
  const auto n = static_cast<std::size_t>(std::llround(cfg.seconds * cfg.sample_rate));
  const auto [lo, hi] = class_band(cfg, label);
  const double fs = cfg.sample_rate;
  const double amp = uniform_in(0.3, 0.8, rng);
  AudioClip clip;
  clip.sample_rate = cfg.sample_rate;
  clip.label = label;
  clip.samples.resize(n);
  switch (class_kind(label)) {
    case SynthKind::kTone: {
      const double f = uniform_in(lo, hi, rng), phase = kTwoPi * uniform01(rng);
      for (std::size_t t = 0; t < n; ++t) clip.samples[t] = amp * std::sin(kTwoPi * f * t / fs + phase);
      break;
    }
    case SynthKind::kChirp: {
      const double f0 = uniform_in(lo, hi, rng), f1 = uniform_in(lo, hi, rng);
      const double duration = n / fs;
      for (std::size_t t = 0; t < n; ++t) {
        const double time = t / fs;
        clip.samples[t] =
            amp * std::sin(kTwoPi * (f0 * time + 0.5 * (f1 - f0) * time * time / duration));
      }
      break;
    }
    case SynthKind::kAmNoise: {
      constexpr int kPartials = 8;
      double freq[kPartials], phase[kPartials];
      for (int i = 0; i < kPartials; ++i) {
        freq[i] = uniform_in(lo, hi, rng);
        phase[i] = kTwoPi * uniform01(rng);
      }
      const double fm = uniform_in(2.0, 8.0, rng);
      for (std::size_t t = 0; t < n; ++t) {
        double s = 0.0;
        for (int i = 0; i < kPartials; ++i) s += std::sin(kTwoPi * freq[i] * t / fs + phase[i]);
        const double env = 0.5 + 0.5 * std::sin(kTwoPi * fm * t / fs);
        clip.samples[t] = amp * env * s / std::sqrt(static_cast<double>(kPartials));
      }
      break;
    }
  }
  AudioClip noise;
  noise.sample_rate = cfg.sample_rate;
  noise.samples = generate_noise(NoiseKind::kWhite, n, cfg.sample_rate, rng);
  if (power(clip.samples) > 0.0) {
    clip = mix_at_snr(clip, noise, cfg.snr_db, rng, "white").noisy;
  }
  clip.label = label;
  return limit_peak(clip);
}

SynthCorpus synthesize(const SynthConfig& cfg) {
  cfg.validate();
  SynthCorpus corpus;
  for (std::size_t c = 0; c < cfg.classes; ++c) {
    for (std::size_t i = 0; i < cfg.clips_per_class; ++i) {
      Rng rng(derive_seed(cfg.seed, {c, i}));
      AudioClip clip = synth_clip(cfg, c, rng);
      char id[64];
      std::snprintf(id, sizeof(id), "class%02zu_%04zu", c, i);
      clip.source_id = id;
      corpus.labeled.push_back(std::move(clip));
    }
  }
  for (std::size_t i = 0; i < cfg.unlabeled_clips; ++i) {
    Rng rng(derive_seed(cfg.seed, {kUnlabeledStream, i}));
    const auto c = std::min(cfg.classes - 1,
                            static_cast<std::size_t>(uniform01(rng) * cfg.classes));
    AudioClip clip = synth_clip(cfg, c, rng);
    clip.label.reset();
    char id[64];
    std::snprintf(id, sizeof(id), "clip_%05zu", i);
    clip.source_id = id;
    corpus.unlabeled.push_back(std::move(clip));
  }
  return corpus;
}

void write_corpus(const SynthCorpus& corpus, const std::string& dir) {
  namespace fs = std::filesystem;
  const fs::path root(dir);
  fs::create_directories(root / "labeled");
  fs::create_directories(root / "unlabeled");
  std::ofstream labeled(root / "labeled.csv", std::ios::trunc);
  labeled << "path,label,split\n";
  for (const auto& clip : corpus.labeled) {
    const std::string rel = "labeled/" + clip.source_id + ".wav";
    save_wav((root / rel).string(), clip);
    labeled << rel << ',' << *clip.label << ",train\n";
  }
  std::ofstream unlabeled(root / "unlabeled.csv", std::ios::trunc);
  unlabeled << "path\n";
  for (const auto& clip : corpus.unlabeled) {
    const std::string rel = "unlabeled/" + clip.source_id + ".wav";
    save_wav((root / rel).string(), clip);
    unlabeled << rel << '\n';
  }
  if (!labeled || !unlabeled) throw DataError("cannot write manifests under '" + dir + "'");
}

}  // namespace wavetrunk::audio
