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


// Binary checkpoint format, little-endian throughout:
//
//   "WTRK"  u32 version  u64 epoch  u32 config_len  config_len bytes (JSON)
//   u32 tensor_count, then per tensor:
//     u16 name_len  name  u8 dtype (0 f32, 1 f64, 2 i64)  u8 rank
//     rank x u64 dims  payload (product of dims x element size)
//   u32 CRC-32 of every preceding byte
//
// Tensors appear in the order the writer lists them, so writing the same
// checkpoint twice yields identical bytes.

#ifndef WAVETRUNK_TRAIN_CHECKPOINT_H_
#define WAVETRUNK_TRAIN_CHECKPOINT_H_

#include <cstdint>
#include <string>
#include <vector>

#include "wavetrunk/ndgrad/array.h"

namespace wavetrunk::train {

inline constexpr std::uint32_t kCheckpointVersion = 1;

enum class DType : std::uint8_t { kF32 = 0, kF64 = 1, kI64 = 2 };

struct CheckpointTensor {
  std::string name;
  DType dtype = DType::kF32;
  ndgrad::Shape shape;
  std::vector<float> f32;
  std::vector<double> f64;
  std::vector<std::int64_t> i64;

  std::size_t size() const;
};

struct Checkpoint {
  std::uint32_t version = kCheckpointVersion;
  std::uint64_t epoch = 0;
  std::string config_json;
  std::vector<CheckpointTensor> tensors;

  const CheckpointTensor* find(const std::string& name) const;
  void add_f32(std::string name, const ndgrad::Array<float>& value);
  void add_f32(std::string name, ndgrad::Shape shape, std::vector<float> values);
  void add_i64(std::string name, std::int64_t value);
};

std::vector<unsigned char> serialize(const Checkpoint& ckpt);
// Throws CheckpointError naming the problem and `source`.
Checkpoint deserialize(const std::vector<unsigned char>& bytes,
                       const std::string& source);

// Writes through a temporary file and renames it into place. Throws
// std::runtime_error on I/O failure.
void write_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint read_checkpoint(const std::string& path);

}  // namespace wavetrunk::train

#endif  // WAVETRUNK_TRAIN_CHECKPOINT_H_
