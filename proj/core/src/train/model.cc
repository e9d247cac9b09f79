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


#include "wavetrunk/train/model.h"

#include <algorithm>
#include <cctype>
#include <set>

#include <nlohmann/json.hpp>

#include "train/streams.h"
#include "wavetrunk/errors.h"

namespace wavetrunk::train {

using json = nlohmann::json;

namespace {

bool valid_name(const std::string& name) {
  return !name.empty() && std::all_of(name.begin(), name.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '_' || c == '-';
  });
}

json head_to_json(const TaskHead& h) {
  const heads::HeadSpec& s = h.spec;
  json j = {
      {"name", h.name},
      {"kind", std::string(heads::to_string(s.kind))},
      {"num_classes", s.num_classes},
      {"lr", s.lr},
      {"hidden_units", s.hidden_units},
      {"conv_channels", s.conv_channels},
      {"conv_widths", s.conv_widths},
      {"conv_strides", s.conv_strides},
      {"dropout", s.dropout},
      {"filter_width", s.filter_width},
      {"warmup_mask", s.warmup_mask},
      {"labels", h.labels},
  };
  j["delay"] = s.delay ? json(*s.delay) : json(nullptr);
  return j;
}

TaskHead head_from_json(const json& j) {
  TaskHead h;
  h.name = j.at("name").get<std::string>();
  heads::HeadSpec& s = h.spec;
  s.kind = heads::parse_head_kind(j.at("kind").get<std::string>());
  s.num_classes = j.at("num_classes").get<std::size_t>();
  s.lr = j.at("lr").get<double>();
  s.hidden_units = j.at("hidden_units").get<std::size_t>();
  s.conv_channels = j.at("conv_channels").get<std::size_t>();
  s.conv_widths = j.at("conv_widths").get<std::array<std::size_t, 3>>();
  s.conv_strides = j.at("conv_strides").get<std::array<std::size_t, 3>>();
  s.dropout = j.at("dropout").get<double>();
  s.filter_width = j.at("filter_width").get<std::size_t>();
  s.warmup_mask = j.at("warmup_mask").get<bool>();
  if (!j.at("delay").is_null()) s.delay = j.at("delay").get<std::size_t>();
  h.labels = j.at("labels").get<std::vector<std::string>>();
  return h;
}

}  // namespace

void ModelSpec::validate() const {
  try {
    trunk.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("trunk: ") + e.what());
  }
  if (heads.empty()) throw ConfigError("model has no heads");
  std::set<std::string> names;
  for (const auto& h : heads) {
    if (!valid_name(h.name)) {
      throw ConfigError("head name '" + h.name +
                        "' must be non-empty letters, digits, '_' or '-'");
    }
    if (!names.insert(h.name).second) {
      throw ConfigError("duplicate head name '" + h.name + "'");
    }
    try {
      h.spec.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError("head '" + h.name + "': " + e.what());
    }
    if (!h.labels.empty() && h.labels.size() != h.spec.num_classes) {
      throw ConfigError("head '" + h.name + "' has " + std::to_string(h.labels.size()) +
                        " labels for " + std::to_string(h.spec.num_classes) + " classes");
    }
  }
}

std::string ModelSpec::to_json() const {
  json j;
  j["trunk"] = {{"blocks", trunk.num_blocks},
                {"layers", trunk.layers_per_block},
                {"channels", trunk.channels}};
  j["heads"] = json::array();
  for (const auto& h : heads) j["heads"].push_back(head_to_json(h));
  return j.dump();
}

ModelSpec ModelSpec::from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    ModelSpec spec;
    spec.trunk.num_blocks = j.at("trunk").at("blocks").get<std::size_t>();
    spec.trunk.layers_per_block = j.at("trunk").at("layers").get<std::size_t>();
    spec.trunk.channels = j.at("trunk").at("channels").get<std::size_t>();
    for (const auto& h : j.at("heads")) spec.heads.push_back(head_from_json(h));
    spec.validate();
    return spec;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed model description: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("malformed model description: ") + e.what());
  }
}

Model::Model(ModelSpec spec, std::uint64_t seed) : spec_(std::move(spec)) {
  spec_.validate();
  Rng trunk_rng(derive_seed(seed, {kStreamTrunkInit}));
  trunk_ = TrunkParams<float>::init(spec_.trunk, trunk_rng);
  const std::size_t tau = wavetrunk::receptive_field(spec_.trunk);
  for (std::size_t i = 0; i < spec_.heads.size(); ++i) {
    Rng head_rng(derive_seed(seed, {kStreamHeadInit, i}));
    heads_.emplace_back(spec_.heads[i].spec, spec_.trunk.channels, tau, head_rng);
  }
}

std::size_t Model::receptive_field() const {
  return wavetrunk::receptive_field(spec_.trunk);
}

std::size_t Model::head_index(const std::string& name) const {
  for (std::size_t i = 0; i < spec_.heads.size(); ++i) {
    if (spec_.heads[i].name == name) return i;
  }
  throw ConfigError("model has no head named '" + name + "'");
}

ndgrad::Array<float> Model::embed(const ndgrad::Array<float>& x) const {
  return trunk_forward(x, trunk_, spec_.trunk);
}

std::vector<ndgrad::NamedParameter<float>> Model::trunk_parameters() const {
  return trunk_.named_parameters();
}

std::vector<ndgrad::NamedParameter<float>> Model::head_parameters(
    std::size_t i) const {
  return heads_.at(i).named_parameters("heads." + spec_.heads.at(i).name + ".");
}

std::vector<ndgrad::NamedParameter<float>> Model::named_tensors() const {
  std::vector<ndgrad::NamedParameter<float>> out = trunk_parameters();
  for (std::size_t i = 0; i < heads_.size(); ++i) {
    auto p = head_parameters(i);
    out.insert(out.end(), p.begin(), p.end());
  }
  for (std::size_t i = 0; i < heads_.size(); ++i) {
    auto b = heads_[i].named_buffers("heads." + spec_.heads[i].name + ".");
    out.insert(out.end(), b.begin(), b.end());
  }
  return out;
}

void Model::set_trunk_trainable(bool trainable) {
  trunk_.set_requires_grad(trainable);
}

}  // namespace wavetrunk::train
