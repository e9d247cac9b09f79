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


#include "wavetrunk/audio/wav.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <vector>

#include "wavetrunk/errors.h"

namespace wavetrunk::audio {
namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

class Reader {
 public:
  Reader(const std::string& path, std::vector<unsigned char> bytes)
      : path_(path), bytes_(std::move(bytes)) {}

  std::size_t offset() const { return pos_; }
  std::size_t remaining() const { return bytes_.size() - pos_; }

  void need(std::size_t n, const char* what) const {
    if (remaining() < n) {
      throw WavFormatError(path_, pos_, std::string("truncated ") + what);
    }
  }
  std::uint16_t u16(const char* what) {
    need(2, what);
    std::uint16_t v = bytes_[pos_] | (bytes_[pos_ + 1] << 8);
    pos_ += 2;
    return v;
  }
  std::uint32_t u32(const char* what) {
    need(4, what);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | bytes_[pos_ + i];
    pos_ += 4;
    return v;
  }
  std::string tag(const char* what) {
    need(4, what);
    std::string t(bytes_.begin() + pos_, bytes_.begin() + pos_ + 4);
    pos_ += 4;
    return t;
  }
  void skip(std::size_t n) { pos_ += std::min(n, remaining()); }
  const unsigned char* here() const { return bytes_.data() + pos_; }

 private:
  std::string path_;
  std::vector<unsigned char> bytes_;
  std::size_t pos_ = 0;
};

void put_u16(std::vector<unsigned char>& out, std::uint16_t v) {
  out.push_back(v & 0xFF);
  out.push_back(v >> 8);
}

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back((v >> (8 * i)) & 0xFF);
}

void put_tag(std::vector<unsigned char>& out, const char* tag) {
  out.insert(out.end(), tag, tag + 4);
}

}  // namespace

AudioClip load_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open WAV file '" + path + "'");
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  Reader r(path, std::move(bytes));

  if (r.tag("RIFF header") != "RIFF") {
    throw WavFormatError(path, 0, "missing RIFF signature");
  }
  r.u32("RIFF size");
  if (r.tag("WAVE tag") != "WAVE") {
    throw WavFormatError(path, 8, "missing WAVE signature");
  }

  bool have_fmt = false;
  std::uint16_t format = 0, channels = 0, bits = 0, block_align = 0;
  std::uint32_t rate = 0;
  while (true) {
    if (r.remaining() < 8) {
      throw WavFormatError(path, r.offset(), "no data chunk");
    }
    const std::size_t chunk_start = r.offset();
    const std::string id = r.tag("chunk id");
    const std::uint32_t size = r.u32("chunk size");
    if (id == "fmt ") {
      if (size < 16) {
        throw WavFormatError(path, chunk_start, "fmt chunk too short");
      }
      r.need(size, "fmt chunk");
      const std::size_t body = r.offset();
      format = r.u16("format tag");
      channels = r.u16("channel count");
      rate = r.u32("sample rate");
      r.u32("byte rate");
      block_align = r.u16("block align");
      bits = r.u16("bits per sample");
      if (format == kFormatExtensible) {
        if (size < 40) {
          throw WavFormatError(path, body, "extensible fmt chunk too short");
        }
        r.skip(8);  // cbSize, valid bits, channel mask
        format = r.u16("sub-format");
      }
      r.skip(size - (r.offset() - body));
      have_fmt = true;
      if (format != kFormatPcm && format != kFormatFloat) {
        throw WavFormatError(path, body, "unsupported codec " + std::to_string(format));
      }
      if ((format == kFormatPcm && bits != 16) ||
          (format == kFormatFloat && bits != 32)) {
        throw WavFormatError(path, body + 14,
                             "unsupported sample width " + std::to_string(bits));
      }
      if (channels != 1 && channels != 2) {
        throw WavFormatError(path, body + 2,
                             "unsupported channel count " + std::to_string(channels));
      }
      if (rate == 0) throw WavFormatError(path, body + 4, "sample rate is zero");
      if (block_align != channels * bits / 8) {
        throw WavFormatError(path, body + 12, "inconsistent block alignment");
      }
    } else if (id == "data") {
      if (!have_fmt) {
        throw WavFormatError(path, chunk_start, "data chunk before fmt chunk");
      }
      const std::size_t frames =
          std::min<std::size_t>(size, r.remaining()) / block_align;
      if (size > r.remaining()) {
        throw WavFormatError(path, r.offset(), "data chunk runs past end of file");
      }
      AudioClip clip;
      clip.sample_rate = static_cast<int>(rate);
      clip.source_id = path;
      clip.samples.resize(frames);
      const unsigned char* p = r.here();
      for (std::size_t f = 0; f < frames; ++f) {
        double sum = 0.0;
        for (std::uint16_t c = 0; c < channels; ++c) {
          if (format == kFormatPcm) {
            const auto v = static_cast<std::int16_t>(p[0] | (p[1] << 8));
            sum += v / 32768.0;
            p += 2;
          } else {
            std::uint32_t u = p[0] | (p[1] << 8) | (p[2] << 16) |
                              (static_cast<std::uint32_t>(p[3]) << 24);
            float v;
            std::memcpy(&v, &u, 4);
            if (!std::isfinite(v)) {
              throw WavFormatError(path, static_cast<std::size_t>(p - r.here()) + r.offset(),
                                   "non-finite sample");
            }
            sum += v;
            p += 4;
          }
        }
        clip.samples[f] = sum / channels;
      }
      return clip;
    } else {
      r.skip(size + (size & 1));
    }
  }
}

void save_wav(const std::string& path, const AudioClip& clip,
              WavEncoding encoding) {
  const bool pcm = encoding == WavEncoding::kPcm16;
  const std::uint16_t bits = pcm ? 16 : 32;
  const std::uint32_t data_bytes =
      static_cast<std::uint32_t>(clip.samples.size() * bits / 8);
  std::vector<unsigned char> out;
  out.reserve(44 + data_bytes);
  put_tag(out, "RIFF");
  put_u32(out, 36 + data_bytes);
  put_tag(out, "WAVE");
  put_tag(out, "fmt ");
  put_u32(out, 16);
  put_u16(out, pcm ? kFormatPcm : kFormatFloat);
  put_u16(out, 1);
  put_u32(out, static_cast<std::uint32_t>(clip.sample_rate));
  put_u32(out, static_cast<std::uint32_t>(clip.sample_rate) * bits / 8);
  put_u16(out, bits / 8);
  put_u16(out, bits);
  put_tag(out, "data");
  put_u32(out, data_bytes);
  for (double s : clip.samples) {
    if (pcm) {
      const double q = std::clamp(std::nearbyint(s * 32768.0), -32768.0, 32767.0);
      put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
    } else {
      const float f = static_cast<float>(s);
      std::uint32_t u;
      std::memcpy(&u, &f, 4);
      put_u32(out, u);
    }
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  file.write(reinterpret_cast<const char*>(out.data()),
             static_cast<std::streamsize>(out.size()));
  if (!file) throw DataError("cannot write WAV file '" + path + "'");
}

}  // namespace wavetrunk::audio
