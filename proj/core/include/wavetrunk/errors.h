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


#ifndef WAVETRUNK_ERRORS_H_
#define WAVETRUNK_ERRORS_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wavetrunk {

// Invalid or inconsistent run configuration. The CLI exits with code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Unreadable or malformed input data. The CLI exits with code 3.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or unsupported WAV file.
class WavFormatError : public DataError {
 public:
  WavFormatError(const std::string& path, std::size_t offset,
                 const std::string& what)
      : DataError(path + ": byte " + std::to_string(offset) + ": " + what),
        offset_(offset) {}

  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

// Truncated, corrupted or incompatible checkpoint file.
class CheckpointError : public DataError {
 public:
  using DataError::DataError;
};

}  // namespace wavetrunk

#endif  // WAVETRUNK_ERRORS_H_
