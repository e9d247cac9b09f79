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


#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <string>

#include "audio/sinc.h"
#include "wavetrunk/audio/audio.h"

namespace wavetrunk::audio {

double power(std::span<const double> x) {
  if (x.empty()) return 0.0;
  double sum = 0.0;
  for (double v : x) sum += v * v;
  return sum / static_cast<double>(x.size());
}

double peak(std::span<const double> x) {
  double p = 0.0;
  for (double v : x) p = std::max(p, std::abs(v));
  return p;
}

AudioClip resample(const AudioClip& clip, int target_rate,
                   std::size_t taps_per_phase) {
  if (clip.sample_rate <= 0 || target_rate <= 0) {
    throw std::invalid_argument("resample: sample rates must be positive, got " +
                                std::to_string(clip.sample_rate) + " and " +
                                std::to_string(target_rate));
  }
  if (taps_per_phase < 2 || taps_per_phase % 2 != 0) {
    throw std::invalid_argument("resample: taps per phase must be even and >= 2");
  }
  AudioClip out = clip;
  out.sample_rate = target_rate;
  if (target_rate == clip.sample_rate) return out;

  const auto src = static_cast<std::size_t>(clip.sample_rate);
  const auto dst = static_cast<std::size_t>(target_rate);
  const std::size_t g = std::gcd(src, dst);
  const std::size_t up = dst / g, down = src / g;
  const std::size_t len = clip.samples.size();
  const auto out_len = static_cast<std::size_t>(
      std::llround(static_cast<double>(len) * dst / src));
  const double cutoff = std::min(1.0, static_cast<double>(dst) / src);
  const std::size_t half = taps_per_phase / 2;

  // phases[p][j] weights input sample i0 + j - (half - 1) at fraction p / up.
  std::vector<std::vector<double>> phases(up, std::vector<double>(taps_per_phase));
  for (std::size_t p = 0; p < up; ++p) {
    const double frac = static_cast<double>(p) / up;
    double sum = 0.0;
    for (std::size_t j = 0; j < taps_per_phase; ++j) {
      const double t = static_cast<double>(j) - static_cast<double>(half - 1) - frac;
      phases[p][j] = windowed_sinc(t, cutoff, static_cast<double>(half));
      sum += phases[p][j];
    }
    for (double& w : phases[p]) w /= sum;
  }

  out.samples.assign(out_len, 0.0);
  for (std::size_t n = 0; n < out_len; ++n) {
    const std::size_t num = n * down;
    const std::size_t i0 = num / up;
    const auto& h = phases[num % up];
    double acc = 0.0;
    for (std::size_t j = 0; j < taps_per_phase; ++j) {
      const std::ptrdiff_t i = static_cast<std::ptrdiff_t>(i0 + j) -
                               static_cast<std::ptrdiff_t>(half - 1);
      if (i >= 0 && i < static_cast<std::ptrdiff_t>(len)) acc += h[j] * clip.samples[i];
    }
    out.samples[n] = acc;
  }
  return out;
}

std::vector<double> resample_to_length(std::span<const double> x,
                                       std::size_t out_len, std::size_t taps) {
  if (x.empty() || out_len == 0) {
    throw std::invalid_argument("resample_to_length: empty input or output");
  }
  if (out_len == x.size()) return {x.begin(), x.end()};
  const double step = static_cast<double>(x.size()) / out_len;
  const double cutoff = std::min(1.0, 1.0 / step);
  const double half = static_cast<double>(taps / 2);
  const auto len = static_cast<std::ptrdiff_t>(x.size());
  std::vector<double> out(out_len);
  std::vector<double> h(taps);
  for (std::size_t n = 0; n < out_len; ++n) {
    const double pos = n * step;
    const auto i0 = static_cast<std::ptrdiff_t>(std::floor(pos));
    double sum = 0.0, acc = 0.0;
    for (std::size_t j = 0; j < taps; ++j) {
      const std::ptrdiff_t i = i0 + static_cast<std::ptrdiff_t>(j) -
                               static_cast<std::ptrdiff_t>(taps / 2 - 1);
      const double w = windowed_sinc(static_cast<double>(i) - pos, cutoff, half);
      sum += w;
      if (i >= 0 && i < len) acc += w * x[i];
    }
    out[n] = acc / sum;
  }
  return out;
}

AudioClip crop_or_pad(const AudioClip& clip, double duration_s, Rng& rng) {
  if (!(duration_s > 0.0)) {
    throw std::invalid_argument("crop_or_pad: duration must be positive, got " +
                                std::to_string(duration_s));
  }
  const auto n = static_cast<std::size_t>(std::llround(duration_s * clip.sample_rate));
  if (n == 0) throw std::invalid_argument("crop_or_pad: duration rounds to zero samples");
  AudioClip out = clip;
  const std::size_t len = clip.samples.size();
  if (len > n) {
    const std::size_t choices = len - n + 1;
    const auto start = std::min(
        choices - 1, static_cast<std::size_t>(uniform01(rng) * static_cast<double>(choices)));
    out.samples.assign(clip.samples.begin() + start, clip.samples.begin() + start + n);
  } else {
    out.samples.resize(n, 0.0);
  }
  return out;
}

AudioClip normalize_peak(const AudioClip& clip) {
  AudioClip out = clip;
  const double p = peak(clip.samples);
  if (p > 0.0) {
    for (double& v : out.samples) v /= p;
  }
  return out;
}

AudioClip limit_peak(const AudioClip& clip) {
  return peak(clip.samples) > 1.0 ? normalize_peak(clip) : clip;
}

AudioClip pre_emphasis(const AudioClip& clip, double coeff) {
  AudioClip out = clip;
  for (std::size_t t = 1; t < clip.samples.size(); ++t) {
    out.samples[t] = clip.samples[t] - coeff * clip.samples[t - 1];
  }
  return out;
}

AudioClip de_emphasis(const AudioClip& clip, double coeff) {
  AudioClip out = clip;
  for (std::size_t t = 1; t < out.samples.size(); ++t) {
    out.samples[t] = clip.samples[t] + coeff * out.samples[t - 1];
  }
  return out;
}

AudioClip rms_normalize(const AudioClip& clip, double target_rms) {
  if (!(target_rms > 0.0)) {
    throw std::invalid_argument("rms_normalize: target must be positive");
  }
  AudioClip out = clip;
  const double rms = std::sqrt(power(clip.samples));
  if (rms > 0.0) {
    const double g = target_rms / rms;
    for (double& v : out.samples) v *= g;
  }
  return out;
}

NoisySample mix_at_snr(const AudioClip& clean, const AudioClip& noise,
                       double snr_db, Rng& rng, std::string noise_kind) {
  const std::size_t len = clean.samples.size();
  if (noise.samples.size() < len) {
    throw std::invalid_argument("mix_at_snr: noise has " +
                                std::to_string(noise.samples.size()) +
                                " samples, clean clip needs " + std::to_string(len));
  }
  if (!std::isfinite(snr_db)) {
    throw std::invalid_argument("mix_at_snr: SNR must be finite");
  }
  const double p_clean = power(clean.samples);
  if (!(p_clean > 0.0)) {
    throw std::invalid_argument("mix_at_snr: clean clip is silent, SNR undefined");
  }
  const std::size_t choices = noise.samples.size() - len + 1;
  const auto start = std::min(
      choices - 1, static_cast<std::size_t>(uniform01(rng) * static_cast<double>(choices)));
  std::span<const double> window(noise.samples.data() + start, len);
  const double p_noise = power(window);
  if (!(p_noise > 0.0)) {
    throw std::invalid_argument("mix_at_snr: noise window is silent, SNR undefined");
  }
  const double alpha = std::sqrt(p_clean / (p_noise * std::pow(10.0, snr_db / 10.0)));

  NoisySample out;
  out.clean = clean;
  out.noisy = clean;
  out.snr_db = snr_db;
  out.noise_kind = std::move(noise_kind);
  for (std::size_t t = 0; t < len; ++t) out.noisy.samples[t] += alpha * window[t];
  const double p = peak(out.noisy.samples);
  if (p > 1.0) {
    for (double& v : out.noisy.samples) v /= p;
    for (double& v : out.clean.samples) v /= p;
  }
  return out;
}

std::vector<double> upsample_lowpass() {
  constexpr std::size_t n = kUpsampleFilterTaps;
  constexpr double center = (n - 1) / 2.0;
  constexpr double band = 0.25;  // twice the cutoff of 1/8 cycles per sample
  std::vector<double> h(n);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) - center;
    const double window =
        0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * (i + 1) / (n + 1));
    h[i] = band * sinc(band * t) * window;
    sum += h[i];
  }
  for (double& v : h) v /= sum;
  return h;
}

std::pair<AudioClip, AudioClip> make_upsample_pair(const AudioClip& clip) {
  const std::size_t len = clip.samples.size();
  if (len < kUpsampleFilterTaps) {
    throw std::invalid_argument("make_upsample_pair: clip has " + std::to_string(len) +
                                " samples, the anti-alias filter needs " +
                                std::to_string(kUpsampleFilterTaps));
  }
  const std::vector<double> h = upsample_lowpass();
  const auto half = static_cast<std::ptrdiff_t>(kUpsampleFilterTaps / 2);
  AudioClip input = clip;
  for (std::size_t k = 0; 4 * k < len; ++k) {
    const auto t = static_cast<std::ptrdiff_t>(4 * k);
    double acc = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) {
      const std::ptrdiff_t s = t + static_cast<std::ptrdiff_t>(i) - half;
      if (s >= 0 && s < static_cast<std::ptrdiff_t>(len)) acc += h[i] * clip.samples[s];
    }
    for (std::size_t j = 4 * k; j < std::min(len, 4 * k + 4); ++j) {
      input.samples[j] = acc;
    }
  }
  return {std::move(input), clip};
}

AudioClip random_pitch_shift(const AudioClip& clip, double max_semitones,
                             Rng& rng) {
  const double s = (2.0 * uniform01(rng) - 1.0) * max_semitones;
  return pitch_shift(clip, s);
}

std::pair<AudioClip, AudioClip> next_step_pair(const AudioClip& clip) {
  AudioClip target = clip;
  if (!clip.samples.empty()) {
    std::copy(clip.samples.begin() + 1, clip.samples.end(), target.samples.begin());
  }
  return {clip, std::move(target)};
}

}  // namespace wavetrunk::audio
