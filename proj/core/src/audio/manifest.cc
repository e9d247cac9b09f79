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


#include "wavetrunk/audio/manifest.h"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>

#include <boost/algorithm/string/trim.hpp>
#include <boost/tokenizer.hpp>

#include "wavetrunk/errors.h"

namespace wavetrunk::audio {
namespace {

std::vector<std::string> split_csv(const std::string& line,
                                   const std::string& where) {
  using Separator = boost::escaped_list_separator<char>;
  std::vector<std::string> fields;
  try {
    boost::tokenizer<Separator> tok(line, Separator('\\', ',', '"'));
    for (const auto& f : tok) fields.push_back(boost::algorithm::trim_copy(f));
  } catch (const boost::escaped_list_error& e) {
    throw DataError(where + ": " + e.what());
  }
  return fields;
}

bool parse_integer(const std::string& s, long long& out) {
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, out);
  return ec == std::errc() && ptr == end && !s.empty();
}

}  // namespace

Manifest Manifest::parse(std::istream& in, const std::string& base_dir,
                         const std::string& source_name) {
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (header.empty() && std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    if (boost::algorithm::trim_copy(line).empty()) continue;
    header = split_csv(line, source_name + ":" + std::to_string(line_no));
  }
  if (header.empty()) throw DataError(source_name + ": manifest has no header line");

  std::map<std::string, std::size_t> column;
  for (std::size_t i = 0; i < header.size(); ++i) {
    const std::string& name = header[i];
    if (name != "path" && name != "label" && name != "split") {
      throw DataError(source_name + ": unknown manifest column '" + name +
                      "' (expected path, label, split)");
    }
    if (!column.emplace(name, i).second) {
      throw DataError(source_name + ": duplicate manifest column '" + name + "'");
    }
  }
  if (!column.count("path")) {
    throw DataError(source_name + ": manifest header lacks a 'path' column");
  }

  std::vector<ManifestRow> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (boost::algorithm::trim_copy(line).empty()) continue;
    const std::string where = source_name + ":" + std::to_string(line_no);
    const std::vector<std::string> fields = split_csv(line, where);
    if (fields.size() != header.size()) {
      throw DataError(where + ": expected " + std::to_string(header.size()) +
                      " fields, got " + std::to_string(fields.size()));
    }
    ManifestRow row;
    row.path = fields[column.at("path")];
    if (row.path.empty()) throw DataError(where + ": empty path");
    if (std::filesystem::path(row.path).is_relative() && !base_dir.empty()) {
      row.path = (std::filesystem::path(base_dir) / row.path).lexically_normal().string();
    }
    if (column.count("label") && !fields[column.at("label")].empty()) {
      row.label = fields[column.at("label")];
    }
    if (column.count("split")) row.split = fields[column.at("split")];
    rows.push_back(std::move(row));
  }
  return Manifest(std::move(rows));
}

Manifest Manifest::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open manifest '" + path + "'");
  Manifest m = parse(in, std::filesystem::path(path).parent_path().string(), path);
  for (const auto& row : m.rows_) {
    std::error_code ec;
    if (!std::filesystem::is_regular_file(row.path, ec)) {
      throw DataError(path + ": referenced file '" + row.path + "' does not exist");
    }
  }
  return m;
}

bool Manifest::labeled() const {
  return !rows_.empty() &&
         std::all_of(rows_.begin(), rows_.end(),
                     [](const ManifestRow& r) { return r.label.has_value(); });
}

Manifest Manifest::filter_split(const std::string& split) const {
  std::vector<ManifestRow> out;
  for (const auto& row : rows_) {
    const std::string& s = row.split.empty() ? std::string("train") : row.split;
    if (s == split) out.push_back(row);
  }
  return Manifest(std::move(out));
}

std::vector<std::string> build_vocabulary(const Manifest& manifest) {
  std::set<std::string> labels;
  for (const auto& row : manifest.rows()) {
    if (row.label) labels.insert(*row.label);
  }
  std::vector<std::string> vocab(labels.begin(), labels.end());
  long long a = 0, b = 0;
  const bool numeric = std::all_of(vocab.begin(), vocab.end(), [&](const std::string& s) {
    return parse_integer(s, a);
  });
  if (numeric) {
    std::sort(vocab.begin(), vocab.end(), [&](const std::string& x, const std::string& y) {
      parse_integer(x, a);
      parse_integer(y, b);
      return a < b;
    });
  }
  return vocab;
}

std::size_t label_index(const std::vector<std::string>& vocabulary,
                        const std::string& label) {
  auto it = std::find(vocabulary.begin(), vocabulary.end(), label);
  if (it == vocabulary.end()) {
    throw DataError("label '" + label + "' is not in the class vocabulary");
  }
  return static_cast<std::size_t>(it - vocabulary.begin());
}

}  // namespace wavetrunk::audio
