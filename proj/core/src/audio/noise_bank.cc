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


#include "wavetrunk/audio/noise_bank.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <numbers>

#include <spdlog/spdlog.h>

#include "wavetrunk/audio/wav.h"
#include "wavetrunk/errors.h"

namespace wavetrunk::audio {
namespace {

constexpr std::size_t kSyntheticKinds = 3;

double gaussian(Rng& rng) {
  const double u1 = 1.0 - uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

// Paul Kellet's refined pink filter.
std::vector<double> pink(std::size_t length, Rng& rng) {
  std::vector<double> out(length);
  double b0 = 0, b1 = 0, b2 = 0, b3 = 0, b4 = 0, b5 = 0, b6 = 0;
  for (double& v : out) {
    const double w = gaussian(rng);
    b0 = 0.99886 * b0 + w * 0.0555179;
    b1 = 0.99332 * b1 + w * 0.0750759;
    b2 = 0.96900 * b2 + w * 0.1538520;
    b3 = 0.86650 * b3 + w * 0.3104856;
    b4 = 0.55000 * b4 + w * 0.5329522;
    b5 = -0.7616 * b5 - w * 0.0168980;
    v = b0 + b1 + b2 + b3 + b4 + b5 + b6 + w * 0.5362;
    b6 = w * 0.115926;
  }
  return out;
}

void scale_to_unit_peak(std::vector<double>& x) {
  const double p = peak(x);
  if (p > 0.0) {
    for (double& v : x) v /= p;
  }
}

}  // namespace

std::string_view to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::kWhite:
      return "white";
    case NoiseKind::kPink:
      return "pink";
    case NoiseKind::kBabble:
      return "babble";
  }
  return "unknown";
}

std::vector<double> generate_noise(NoiseKind kind, std::size_t length,
                                   int sample_rate, Rng& rng) {
  std::vector<double> out;
  switch (kind) {
    case NoiseKind::kWhite:
      out.resize(length);
      for (double& v : out) v = gaussian(rng);
      break;
    case NoiseKind::kPink:
      out = pink(length, rng);
      break;
    case NoiseKind::kBabble: {
      out = pink(length, rng);
      constexpr int kTalkers = 4;
      double freq[kTalkers], phase[kTalkers];
      for (int i = 0; i < kTalkers; ++i) {
        freq[i] = 3.0 + 3.0 * uniform01(rng);
        phase[i] = 2.0 * std::numbers::pi * uniform01(rng);
      }
      for (std::size_t t = 0; t < length; ++t) {
        const double time = static_cast<double>(t) / sample_rate;
        double env = 0.0;
        for (int i = 0; i < kTalkers; ++i) {
          env += 0.5 + 0.5 * std::sin(2.0 * std::numbers::pi * freq[i] * time + phase[i]);
        }
        out[t] *= 0.1 + env / kTalkers;
      }
      break;
    }
  }
  scale_to_unit_peak(out);
  return out;
}

NoiseBank NoiseBank::from_directory(const std::string& dir, int sample_rate) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) {
    throw DataError("noise bank '" + dir + "' is not a directory");
  }
  std::vector<std::string> paths;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (ext == ".wav") paths.push_back(entry.path().string());
  }
  std::sort(paths.begin(), paths.end());
  NoiseBank bank;
  for (const auto& path : paths) {
    AudioClip clip = resample(load_wav(path), sample_rate);
    if (!(power(clip.samples) > 0.0)) {
      spdlog::warn("noise bank: skipping silent file {}", path);
      continue;
    }
    bank.external_.push_back(std::move(clip));
  }
  spdlog::info("noise bank: {} external clips from {}", bank.external_.size(), dir);
  return bank;
}

AudioClip NoiseBank::draw(std::size_t length, int sample_rate, Rng& rng,
                          std::string* kind) const {
  const std::size_t sources = kSyntheticKinds + external_.size();
  const std::size_t pick = std::min(
      sources - 1, static_cast<std::size_t>(uniform01(rng) * static_cast<double>(sources)));
  AudioClip out;
  out.sample_rate = sample_rate;
  if (pick < kSyntheticKinds) {
    const auto k = static_cast<NoiseKind>(pick);
    out.samples = generate_noise(k, length, sample_rate, rng);
    out.source_id = std::string(to_string(k));
  } else {
    const AudioClip& src = external_[pick - kSyntheticKinds];
    const std::size_t n = src.samples.size();
    const auto start = std::min(n - 1, static_cast<std::size_t>(uniform01(rng) * n));
    out.samples.resize(length);
    for (std::size_t t = 0; t < length; ++t) out.samples[t] = src.samples[(start + t) % n];
    out.source_id = src.source_id;
  }
  if (kind) *kind = pick < kSyntheticKinds ? out.source_id : "external";
  return out;
}

}  // namespace wavetrunk::audio
