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


#ifndef WAVETRUNK_AUDIO_WAV_H_
#define WAVETRUNK_AUDIO_WAV_H_

#include <string>

#include "wavetrunk/audio/audio.h"

namespace wavetrunk::audio {

enum class WavEncoding { kPcm16, kFloat32 };

// Reads RIFF/WAVE PCM16 or IEEE float32, mono or stereo. Stereo is averaged
// to mono and PCM16 is scaled by 1/32768. Throws WavFormatError.
AudioClip load_wav(const std::string& path);

// Writes a mono file. PCM16 rounds to nearest and clamps to [-32768, 32767].
// Throws DataError when the file cannot be written.
void save_wav(const std::string& path, const AudioClip& clip,
              WavEncoding encoding = WavEncoding::kPcm16);

}  // namespace wavetrunk::audio

#endif  // WAVETRUNK_AUDIO_WAV_H_
