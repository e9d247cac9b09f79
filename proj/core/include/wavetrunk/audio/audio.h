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


// Waveform preprocessing and self-supervised target synthesis.
//
// Samples are held in double precision; conversion to the training type
// happens when a batch is assembled. Every operation is a pure function of
// its arguments and the RNG it is handed.

#ifndef WAVETRUNK_AUDIO_AUDIO_H_
#define WAVETRUNK_AUDIO_AUDIO_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "wavetrunk/ndgrad/random.h"

namespace wavetrunk::audio {

inline constexpr int kCanonicalRate = 16000;

struct AudioClip {
  std::vector<double> samples;
  int sample_rate = kCanonicalRate;
  std::optional<std::size_t> label;
  std::string source_id;

  std::size_t size() const { return samples.size(); }
  double seconds() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

struct NoisySample {
  AudioClip clean;
  AudioClip noisy;
  double snr_db = 0.0;
  std::string noise_kind;
};

// Mean of squares; 0 for an empty clip.
double power(std::span<const double> x);
double peak(std::span<const double> x);

// Polyphase Hann-windowed sinc resampler for the rational ratio
// target/source. Output length is round(len * target / source).
AudioClip resample(const AudioClip& clip, int target_rate,
                   std::size_t taps_per_phase = 64);

// Windowed-sinc interpolation of `x` onto `out_len` evenly spaced points
// covering the same time span; used for irrational ratios.
std::vector<double> resample_to_length(std::span<const double> x,
                                       std::size_t out_len,
                                       std::size_t taps = 64);

// Random window of round(duration_s * rate) samples, or zero right-padding.
AudioClip crop_or_pad(const AudioClip& clip, double duration_s, Rng& rng);

AudioClip normalize_peak(const AudioClip& clip);
// Divides by the peak only when it exceeds 1.
AudioClip limit_peak(const AudioClip& clip);

AudioClip pre_emphasis(const AudioClip& clip, double coeff = 0.97);
// Inverse of pre_emphasis: y[t] = x[t] + coeff * y[t - 1].
AudioClip de_emphasis(const AudioClip& clip, double coeff = 0.97);

AudioClip rms_normalize(const AudioClip& clip, double target_rms = 0.1);

// Adds a random window of `noise` scaled to the requested SNR, then rescales
// clean and noisy together by 1 / max(1, peak(noisy)).
NoisySample mix_at_snr(const AudioClip& clean, const AudioClip& noise,
                       double snr_db, Rng& rng,
                       std::string noise_kind = "external");

// Number of taps of the anti-alias filter used by make_upsample_pair.
inline constexpr std::size_t kUpsampleFilterTaps = 127;
// Low-pass coefficients (cutoff 1/8 cycles per sample, unit DC gain).
std::vector<double> upsample_lowpass();

// Returns (low-pass, decimate by 4, repeat each sample 4 times; original).
std::pair<AudioClip, AudioClip> make_upsample_pair(const AudioClip& clip);

// Phase-vocoder time stretch (STFT 1024, hop 256, Hann). rate > 1 shortens.
std::vector<double> time_stretch(std::span<const double> x, double rate);

// Shifts pitch by `semitones` while keeping the length.
AudioClip pitch_shift(const AudioClip& clip, double semitones);
// Shift drawn uniformly from [-max_semitones, max_semitones].
AudioClip random_pitch_shift(const AudioClip& clip, double max_semitones,
                             Rng& rng);

// (clip, clip shifted left by one); the last target frame repeats the last
// sample and is excluded from the next-step loss.
std::pair<AudioClip, AudioClip> next_step_pair(const AudioClip& clip);

}  // namespace wavetrunk::audio

#endif  // WAVETRUNK_AUDIO_AUDIO_H_
