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


#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "wavetrunk/audio/audio.h"

namespace wavetrunk::audio {
namespace {

constexpr std::size_t kFftSize = 1024;
constexpr std::size_t kHop = 256;
constexpr std::size_t kBins = kFftSize / 2 + 1;

using Spectrum = std::vector<std::complex<double>>;

std::vector<double> hann_window() {
  std::vector<double> w(kFftSize);
  for (std::size_t i = 0; i < kFftSize; ++i) {
    w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / kFftSize);
  }
  return w;
}

double wrap_phase(double p) {
  return p - 2.0 * std::numbers::pi * std::round(p / (2.0 * std::numbers::pi));
}

}  // namespace

std::vector<double> time_stretch(std::span<const double> x, double rate) {
  if (!(rate > 0.0) || !std::isfinite(rate)) {
    throw std::invalid_argument("time_stretch: rate must be positive");
  }
  if (x.empty()) throw std::invalid_argument("time_stretch: empty input");
  const std::size_t len = x.size();
  const std::size_t pad = kFftSize / 2;
  std::vector<double> padded(len + 2 * pad, 0.0);
  std::copy(x.begin(), x.end(), padded.begin() + pad);
  const std::size_t frames = 1 + len / kHop;
  padded.resize(std::max(padded.size(), (frames - 1) * kHop + kFftSize), 0.0);

  const std::vector<double> window = hann_window();
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);

  std::vector<Spectrum> stft(frames + 2, Spectrum(kBins));
  std::vector<double> frame(kFftSize);
  for (std::size_t f = 0; f < frames; ++f) {
    for (std::size_t i = 0; i < kFftSize; ++i) {
      frame[i] = padded[f * kHop + i] * window[i];
    }
    fft.fwd(stft[f], frame);
  }

  std::vector<double> advance(kBins);
  for (std::size_t k = 0; k < kBins; ++k) {
    advance[k] = 2.0 * std::numbers::pi * kHop * k / kFftSize;
  }
  std::vector<double> phase(kBins);
  for (std::size_t k = 0; k < kBins; ++k) phase[k] = std::arg(stft[0][k]);

  std::vector<Spectrum> stretched;
  for (double step = 0.0; step < static_cast<double>(frames); step += rate) {
    const auto f = static_cast<std::size_t>(step);
    const double alpha = step - static_cast<double>(f);
    Spectrum col(kBins);
    for (std::size_t k = 0; k < kBins; ++k) {
      const double mag =
          (1.0 - alpha) * std::abs(stft[f][k]) + alpha * std::abs(stft[f + 1][k]);
      col[k] = std::polar(mag, phase[k]);
      const double dphase =
          wrap_phase(std::arg(stft[f + 1][k]) - std::arg(stft[f][k]) - advance[k]);
      phase[k] += advance[k] + dphase;
    }
    stretched.push_back(std::move(col));
  }

  const std::size_t out_len =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(len / rate)));
  const std::size_t total = (stretched.size() - 1) * kHop + kFftSize;
  std::vector<double> y(std::max(total, out_len + pad), 0.0);
  std::vector<double> norm(y.size(), 0.0);
  std::vector<double> chunk(kFftSize);
  for (std::size_t f = 0; f < stretched.size(); ++f) {
    fft.inv(chunk, stretched[f], kFftSize);
    for (std::size_t i = 0; i < kFftSize; ++i) {
      y[f * kHop + i] += chunk[i] * window[i];
      norm[f * kHop + i] += window[i] * window[i];
    }
  }
  std::vector<double> out(out_len, 0.0);
  for (std::size_t t = 0; t < out_len; ++t) {
    const std::size_t i = t + pad;
    if (i < y.size()) out[t] = norm[i] > 1e-10 ? y[i] / norm[i] : y[i];
  }
  return out;
}

AudioClip pitch_shift(const AudioClip& clip, double semitones) {
  if (!(std::abs(semitones) <= 12.0)) {
    throw std::invalid_argument("pitch_shift: |semitones| must be at most 12, got " +
                                std::to_string(semitones));
  }
  AudioClip out = clip;
  if (semitones == 0.0 || clip.samples.empty()) return out;
  const double rate = std::pow(2.0, -semitones / 12.0);
  const std::vector<double> stretched = time_stretch(clip.samples, rate);
  out.samples = resample_to_length(stretched, clip.samples.size());
  return out;
}

}  // namespace wavetrunk::audio
