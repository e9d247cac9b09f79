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


// Manifest files: UTF-8 CSV with a header line. Labeled corpora use
// `path,label,split`; unlabeled corpora may carry `path` only. Relative
// paths are resolved against the manifest's directory.

#ifndef WAVETRUNK_AUDIO_MANIFEST_H_
#define WAVETRUNK_AUDIO_MANIFEST_H_

#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <vector>

namespace wavetrunk::audio {

struct ManifestRow {
  std::string path;
  std::optional<std::string> label;
  std::string split;
};

class Manifest {
 public:
  Manifest() = default;
  explicit Manifest(std::vector<ManifestRow> rows) : rows_(std::move(rows)) {}

  // Parses and checks that every referenced file exists. Throws DataError.
  static Manifest load(const std::string& path);
  // Parses without touching the file system.
  static Manifest parse(std::istream& in, const std::string& base_dir,
                        const std::string& source_name);

  const std::vector<ManifestRow>& rows() const { return rows_; }
  std::size_t size() const { return rows_.size(); }
  bool labeled() const;

  // Rows whose split equals `split`; rows without a split count as "train".
  Manifest filter_split(const std::string& split) const;

 private:
  std::vector<ManifestRow> rows_;
};

// Distinct labels ordered numerically when all are integers, otherwise
// lexicographically. The position of a label is its class index.
std::vector<std::string> build_vocabulary(const Manifest& manifest);

// Class index of `label`; throws DataError if it is not in `vocabulary`.
std::size_t label_index(const std::vector<std::string>& vocabulary,
                        const std::string& label);

}  // namespace wavetrunk::audio

#endif  // WAVETRUNK_AUDIO_MANIFEST_H_
