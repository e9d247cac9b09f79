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


#include "wavetrunk/train/checkpoint.h"

#include <algorithm>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <stdexcept>

#include <zlib.h>

#include "wavetrunk/errors.h"

namespace wavetrunk::train {
namespace {

constexpr char kMagic[4] = {'W', 'T', 'R', 'K'};

std::size_t element_size(DType t) { return t == DType::kF32 ? 4 : 8; }

std::uint32_t crc(const unsigned char* data, std::size_t n) {
  uLong c = crc32(0L, Z_NULL, 0);
  while (n > 0) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(n, 1u << 30));
    c = crc32(c, data, chunk);
    data += chunk;
    n -= chunk;
  }
  return static_cast<std::uint32_t>(c);
}

class Writer {
 public:
  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const unsigned char*>(p);
    out_.insert(out_.end(), b, b + n);
  }
  template <typename U>
  void le(U v) {
    for (std::size_t i = 0; i < sizeof(U); ++i) {
      out_.push_back(static_cast<unsigned char>((static_cast<std::uint64_t>(v) >> (8 * i)) & 0xFF));
    }
  }
  std::vector<unsigned char>& out() { return out_; }

 private:
  std::vector<unsigned char> out_;
};

class Reader {
 public:
  Reader(const std::vector<unsigned char>& b, std::size_t end, std::string source)
      : b_(b), end_(end), source_(std::move(source)) {}

  void need(std::size_t n, const char* what) const {
    if (end_ - pos_ < n) {
      throw CheckpointError(source_ + ": truncated " + what + " at byte " +
                            std::to_string(pos_));
    }
  }
  template <typename U>
  U le(const char* what) {
    need(sizeof(U), what);
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) {
      v |= static_cast<std::uint64_t>(b_[pos_ + i]) << (8 * i);
    }
    pos_ += sizeof(U);
    return static_cast<U>(v);
  }
  std::string str(std::size_t n, const char* what) {
    need(n, what);
    std::string s(b_.begin() + pos_, b_.begin() + pos_ + n);
    pos_ += n;
    return s;
  }
  const unsigned char* take(std::size_t n, const char* what) {
    need(n, what);
    const unsigned char* p = b_.data() + pos_;
    pos_ += n;
    return p;
  }
  std::size_t pos() const { return pos_; }

 private:
  const std::vector<unsigned char>& b_;
  std::size_t end_;
  std::size_t pos_ = 0;
  std::string source_;
};

}  // namespace

std::size_t CheckpointTensor::size() const { return ndgrad::shape_size(shape); }

const CheckpointTensor* Checkpoint::find(const std::string& name) const {
  for (const auto& t : tensors) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

void Checkpoint::add_f32(std::string name, const ndgrad::Array<float>& value) {
  auto d = value.data();
  add_f32(std::move(name), value.shape(), std::vector<float>(d.begin(), d.end()));
}

void Checkpoint::add_f32(std::string name, ndgrad::Shape shape,
                         std::vector<float> values) {
  CheckpointTensor t;
  t.name = std::move(name);
  t.dtype = DType::kF32;
  t.shape = std::move(shape);
  t.f32 = std::move(values);
  tensors.push_back(std::move(t));
}

void Checkpoint::add_i64(std::string name, std::int64_t value) {
  CheckpointTensor t;
  t.name = std::move(name);
  t.dtype = DType::kI64;
  t.shape = {1};
  t.i64 = {value};
  tensors.push_back(std::move(t));
}

std::vector<unsigned char> serialize(const Checkpoint& ckpt) {
  Writer w;
  w.bytes(kMagic, 4);
  w.le<std::uint32_t>(ckpt.version);
  w.le<std::uint64_t>(ckpt.epoch);
  w.le<std::uint32_t>(static_cast<std::uint32_t>(ckpt.config_json.size()));
  w.bytes(ckpt.config_json.data(), ckpt.config_json.size());
  w.le<std::uint32_t>(static_cast<std::uint32_t>(ckpt.tensors.size()));
  for (const auto& t : ckpt.tensors) {
    if (t.name.size() > 0xFFFF) throw std::invalid_argument("tensor name too long");
    if (t.shape.size() > 0xFF) throw std::invalid_argument("tensor rank too large");
    const std::size_t n = t.size();
    const std::size_t have = t.dtype == DType::kF32   ? t.f32.size()
                             : t.dtype == DType::kF64 ? t.f64.size()
                                                      : t.i64.size();
    if (n != have) {
      throw std::invalid_argument("tensor '" + t.name + "' has " + std::to_string(have) +
                                  " values for shape " + ndgrad::shape_string(t.shape));
    }
    w.le<std::uint16_t>(static_cast<std::uint16_t>(t.name.size()));
    w.bytes(t.name.data(), t.name.size());
    w.le<std::uint8_t>(static_cast<std::uint8_t>(t.dtype));
    w.le<std::uint8_t>(static_cast<std::uint8_t>(t.shape.size()));
    for (std::size_t d : t.shape) w.le<std::uint64_t>(d);
    for (std::size_t i = 0; i < n; ++i) {
      if (t.dtype == DType::kF32) {
        std::uint32_t u;
        std::memcpy(&u, &t.f32[i], 4);
        w.le(u);
      } else if (t.dtype == DType::kF64) {
        std::uint64_t u;
        std::memcpy(&u, &t.f64[i], 8);
        w.le(u);
      } else {
        w.le(static_cast<std::uint64_t>(t.i64[i]));
      }
    }
  }
  const std::uint32_t sum = crc(w.out().data(), w.out().size());
  w.le(sum);
  return std::move(w.out());
}

Checkpoint deserialize(const std::vector<unsigned char>& bytes,
                       const std::string& source) {
  if (bytes.size() < 8 || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw CheckpointError(source + ": not a checkpoint (bad magic)");
  }
  const std::size_t body = bytes.size() - 4;
  Reader trailer(bytes, bytes.size(), source);
  trailer.take(body, "body");
  const auto stored = trailer.le<std::uint32_t>("checksum");
  if (crc(bytes.data(), body) != stored) {
    throw CheckpointError(source + ": checksum mismatch (file truncated or corrupted)");
  }

  Reader r(bytes, body, source);
  r.take(4, "magic");
  Checkpoint ckpt;
  ckpt.version = r.le<std::uint32_t>("version");
  if (ckpt.version != kCheckpointVersion) {
    throw CheckpointError(source + ": format version " + std::to_string(ckpt.version) +
                          " is not supported (expected " +
                          std::to_string(kCheckpointVersion) + ")");
  }
  ckpt.epoch = r.le<std::uint64_t>("epoch");
  const auto config_len = r.le<std::uint32_t>("config length");
  ckpt.config_json = r.str(config_len, "config");
  const auto count = r.le<std::uint32_t>("tensor count");
  for (std::uint32_t k = 0; k < count; ++k) {
    CheckpointTensor t;
    const auto name_len = r.le<std::uint16_t>("tensor name length");
    t.name = r.str(name_len, "tensor name");
    const auto dtype = r.le<std::uint8_t>("dtype");
    if (dtype > 2) {
      throw CheckpointError(source + ": tensor '" + t.name + "' has unknown dtype " +
                            std::to_string(dtype));
    }
    t.dtype = static_cast<DType>(dtype);
    const auto rank = r.le<std::uint8_t>("rank");
    std::size_t n = 1;
    for (std::uint8_t d = 0; d < rank; ++d) {
      const auto dim = r.le<std::uint64_t>("dimension");
      if (dim == 0 || dim > body) {
        throw CheckpointError(source + ": tensor '" + t.name + "' has invalid dimension");
      }
      t.shape.push_back(static_cast<std::size_t>(dim));
      n *= static_cast<std::size_t>(dim);
      if (n > body) {
        throw CheckpointError(source + ": tensor '" + t.name + "' is larger than the file");
      }
    }
    const unsigned char* p = r.take(n * element_size(t.dtype), "tensor payload");
    if (t.dtype == DType::kF32) {
      t.f32.resize(n);
      for (std::size_t i = 0; i < n; ++i) {
        std::uint32_t u = p[4 * i] | (p[4 * i + 1] << 8) | (p[4 * i + 2] << 16) |
                          (static_cast<std::uint32_t>(p[4 * i + 3]) << 24);
        std::memcpy(&t.f32[i], &u, 4);
      }
    } else {
      std::vector<std::uint64_t> raw(n);
      for (std::size_t i = 0; i < n; ++i) {
        std::uint64_t u = 0;
        for (int b = 7; b >= 0; --b) u = (u << 8) | p[8 * i + b];
        raw[i] = u;
      }
      if (t.dtype == DType::kF64) {
        t.f64.resize(n);
        std::memcpy(t.f64.data(), raw.data(), 8 * n);
      } else {
        t.i64.resize(n);
        std::memcpy(t.i64.data(), raw.data(), 8 * n);
      }
    }
    ckpt.tensors.push_back(std::move(t));
  }
  if (r.pos() != body) {
    throw CheckpointError(source + ": " + std::to_string(body - r.pos()) +
                          " unexpected trailing bytes");
  }
  return ckpt;
}

void write_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  const std::vector<unsigned char> bytes = serialize(ckpt);
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) throw std::runtime_error("I/O error writing checkpoint '" + tmp + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    throw std::runtime_error("I/O error renaming checkpoint to '" + path +
                             "': " + ec.message());
  }
}

Checkpoint read_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint '" + path + "'");
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  return deserialize(bytes, path);
}

}  // namespace wavetrunk::train
