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


#include "cli/run_config.h"

#include <array>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "wavetrunk/errors.h"

namespace wavetrunk::cli {

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Reads keys of one JSON object and rejects whatever was not read.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where() + ": expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }
  std::string path_of(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }
  const json* take(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() || it->is_null() ? nullptr : &*it;
  }

  void get(const std::string& key, std::size_t& out) {
    if (const json* v = take(key)) out = unsigned_value(*v, path_of(key));
  }
  void get(const std::string& key, std::uint64_t& out, bool) {
    if (const json* v = take(key)) out = unsigned_value(*v, path_of(key));
  }
  void get(const std::string& key, std::uint32_t& out) {
    if (const json* v = take(key)) {
      const auto u = unsigned_value(*v, path_of(key));
      if (u > std::numeric_limits<std::uint32_t>::max()) {
        throw ConfigError(path_of(key) + ": value too large");
      }
      out = static_cast<std::uint32_t>(u);
    }
  }
  void get(const std::string& key, int& out) {
    if (const json* v = take(key)) {
      const auto u = unsigned_value(*v, path_of(key));
      if (u > static_cast<std::uint64_t>(std::numeric_limits<int>::max())) {
        throw ConfigError(path_of(key) + ": value too large");
      }
      out = static_cast<int>(u);
    }
  }
  void get(const std::string& key, double& out) {
    if (const json* v = take(key)) {
      if (!v->is_number()) throw ConfigError(path_of(key) + ": expected a number");
      out = v->get<double>();
    }
  }
  void get(const std::string& key, bool& out) {
    if (const json* v = take(key)) {
      if (!v->is_boolean()) throw ConfigError(path_of(key) + ": expected true or false");
      out = v->get<bool>();
    }
  }
  void get(const std::string& key, std::string& out) {
    if (const json* v = take(key)) {
      if (!v->is_string()) throw ConfigError(path_of(key) + ": expected a string");
      out = v->get<std::string>();
    }
  }
  void get(const std::string& key, std::array<double, 2>& out) {
    if (const json* v = take(key)) {
      if (!v->is_array() || v->size() != 2 || !(*v)[0].is_number() || !(*v)[1].is_number()) {
        throw ConfigError(path_of(key) + ": expected [low, high]");
      }
      out = {(*v)[0].get<double>(), (*v)[1].get<double>()};
    }
  }
  void get(const std::string& key, std::array<std::size_t, 3>& out) {
    if (const json* v = take(key)) {
      if (!v->is_array() || v->size() != 3) {
        throw ConfigError(path_of(key) + ": expected an array of 3 integers");
      }
      for (std::size_t i = 0; i < 3; ++i) {
        out[i] = unsigned_value((*v)[i], path_of(key) + "[" + std::to_string(i) + "]");
      }
    }
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) throw ConfigError("unknown key '" + path_of(key) + "'");
    }
  }

 private:
  std::string where() const { return path_.empty() ? "config" : path_; }

  static std::uint64_t unsigned_value(const json& v, const std::string& path) {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) {
      return static_cast<std::uint64_t>(v.get<std::int64_t>());
    }
    throw ConfigError(path + ": expected a non-negative integer");
  }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

std::string resolve(const std::string& base_dir, const std::string& path) {
  if (path.empty() || base_dir.empty() || fs::path(path).is_absolute()) return path;
  return (fs::path(base_dir) / path).lexically_normal().string();
}

// Head options that apply to each kind, beyond the common task keys.
const std::set<std::string>& head_options(heads::HeadKind kind) {
  using K = heads::HeadKind;
  static const std::map<K, std::set<std::string>> options = {
      {K::kTagging, {"num_classes", "hidden_units"}},
      {K::kSpeakerId, {"num_classes", "hidden_units"}},
      {K::kSpeechCommand,
       {"num_classes", "conv_channels", "conv_widths", "conv_strides", "dropout"}},
      {K::kNextStep, {"hidden_units", "filter_width", "warmup_mask"}},
      {K::kDenoise, {"hidden_units", "filter_width", "delay"}},
      {K::kUpsample, {"hidden_units", "filter_width", "delay"}},
  };
  return options.at(kind);
}

TaskConfig parse_task(const json& j, const std::string& path,
                      const std::string& base_dir) {
  Section s(j, path);
  std::string kind_name;
  s.get("kind", kind_name);
  if (kind_name.empty()) throw ConfigError(path + ".kind: required");
  heads::HeadKind kind;
  try {
    kind = heads::parse_head_kind(kind_name);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path + ".kind: " + e.what());
  }
  TaskConfig t;
  t.head = heads::HeadSpec::defaults(kind);
  t.name = kind_name;
  if (heads::is_classification(kind)) t.head.num_classes = 0;
  s.get("name", t.name);
  s.get("manifest", t.manifest);
  s.get("unlabeled_manifest", t.unlabeled_manifest);
  s.get("split", t.split);
  s.get("lr", t.head.lr);
  s.get("weight", t.weight);

  static const std::set<std::string> all_options = {
      "num_classes", "hidden_units", "conv_channels", "conv_widths", "conv_strides",
      "dropout",     "filter_width", "warmup_mask",   "delay"};
  const auto& allowed = head_options(kind);
  for (const auto& key : all_options) {
    if (s.has(key) && !allowed.count(key)) {
      throw ConfigError("key '" + s.path_of(key) + "' does not apply to " + kind_name +
                        " heads");
    }
  }
  s.get("num_classes", t.head.num_classes);
  s.get("hidden_units", t.head.hidden_units);
  s.get("conv_channels", t.head.conv_channels);
  s.get("conv_widths", t.head.conv_widths);
  s.get("conv_strides", t.head.conv_strides);
  s.get("dropout", t.head.dropout);
  s.get("filter_width", t.head.filter_width);
  s.get("warmup_mask", t.head.warmup_mask);
  if (s.has("delay")) {
    std::size_t delay = 0;
    s.get("delay", delay);
    t.head.delay = delay;
  }
  s.finish();

  if (t.data_manifest().empty()) throw ConfigError(path + ".manifest: required");
  if (heads::is_classification(kind) && t.manifest.empty()) {
    throw ConfigError(path + ".manifest: a labeled manifest is required for " + kind_name);
  }
  if (heads::is_classification(kind) && !t.unlabeled_manifest.empty()) {
    throw ConfigError(path + ".unlabeled_manifest: only self-supervised tasks take "
                      "an unlabeled corpus");
  }
  t.manifest = resolve(base_dir, t.manifest);
  t.unlabeled_manifest = resolve(base_dir, t.unlabeled_manifest);
  heads::HeadSpec check = t.head;
  if (heads::is_classification(kind) && check.num_classes == 0) check.num_classes = 1;
  try {
    check.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path + ": " + e.what());
  }
  if (!(t.weight >= 0.0)) throw ConfigError(path + ".weight: must be >= 0");
  return t;
}

}  // namespace

RunConfig RunConfig::parse(const std::string& text, const std::string& base_dir,
                           const std::string& source) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(source + ": invalid JSON: " + e.what());
  }
  RunConfig cfg;
  cfg.train.epochs = 10;
  try {
    Section top(root, "");
    if (const json* t = top.take("trunk")) {
      Section s(*t, "trunk");
      s.get("blocks", cfg.trunk.num_blocks);
      s.get("layers", cfg.trunk.layers_per_block);
      s.get("channels", cfg.trunk.channels);
      s.finish();
      cfg.trunk_given = true;
      try {
        cfg.trunk.validate();
      } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("trunk: ") + e.what());
      }
    }
    if (const json* tasks = top.take("tasks")) {
      if (!tasks->is_array()) throw ConfigError("tasks: expected an array");
      for (std::size_t i = 0; i < tasks->size(); ++i) {
        cfg.tasks.push_back(
            parse_task((*tasks)[i], "tasks[" + std::to_string(i) + "]", base_dir));
      }
    }
    if (const json* t = top.take("train")) {
      Section s(*t, "train");
      s.get("batch_size", cfg.train.batch_size);
      s.get("epochs", cfg.train.epochs, true);
      s.get("seed", cfg.train.seed, true);
      s.get("clip_seconds", cfg.train.clip_seconds);
      s.get("trunk_lr", cfg.train.trunk_lr);
      s.get("workers", cfg.train.workers);
      s.get("freeze_trunk", cfg.train.freeze_trunk);
      if (const json* sch = s.take("schedule")) {
        Section ss(*sch, "train.schedule");
        ss.get("epochs_per_step", cfg.train.schedule.epochs_per_step);
        ss.get("multiplier", cfg.train.schedule.multiplier);
        ss.finish();
      }
      if (const json* adam = s.take("adam")) {
        Section sa(*adam, "train.adam");
        sa.get("beta0", cfg.train.adam.beta0);
        sa.get("beta1", cfg.train.adam.beta1);
        sa.get("epsilon", cfg.train.adam.epsilon);
        sa.finish();
      }
      s.finish();
    }
    if (const json* d = top.take("data")) {
      Section s(*d, "data");
      s.get("sample_rate", cfg.data.sample_rate);
      s.get("pre_emphasis", cfg.data.pre_emphasis);
      s.get("rms_target", cfg.data.rms_target);
      s.get("denoise_snr_range", cfg.data.denoise_snr_db);
      s.get("noise_bank", cfg.data.noise_bank);
      if (const json* a = s.take("augment")) {
        Section sa(*a, "data.augment");
        sa.get("enabled", cfg.data.augment.enabled);
        sa.get("pitch_prob", cfg.data.augment.pitch_prob);
        sa.get("pitch_range", cfg.data.augment.pitch_range);
        sa.get("noise_prob", cfg.data.augment.noise_prob);
        sa.get("snr_range", cfg.data.augment.snr_db);
        sa.finish();
      }
      s.finish();
      cfg.data.noise_bank = resolve(base_dir, cfg.data.noise_bank);
    }
    if (const json* io = top.take("io")) {
      Section s(*io, "io");
      s.get("checkpoint_dir", cfg.io.checkpoint_dir);
      s.get("log_path", cfg.io.log_path);
      s.get("checkpoint_every", cfg.io.checkpoint_every, true);
      s.finish();
    }
    top.finish();
  } catch (const ConfigError& e) {
    throw ConfigError(source + ": " + e.what());
  }
  cfg.io.checkpoint_dir = resolve(base_dir, cfg.io.checkpoint_dir);
  cfg.io.log_path = resolve(base_dir, cfg.io.log_path);
  try {
    cfg.train_config().validate();
    cfg.data.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(source + ": " + e.what());
  }
  return cfg;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream text;
  text << in.rdbuf();
  return parse(text.str(), fs::path(path).parent_path().string(), path);
}

std::string RunConfig::log_path() const {
  if (!io.log_path.empty()) return io.log_path;
  return (fs::path(io.checkpoint_dir) / "train_log.csv").string();
}

train::TrainConfig RunConfig::train_config() const {
  train::TrainConfig t = train;
  t.checkpoint_dir = io.checkpoint_dir;
  t.checkpoint_every = io.checkpoint_every;
  t.log_path = log_path();
  return t;
}

std::vector<train::Task> load_tasks(
    const RunConfig& cfg,
    const std::vector<std::pair<std::string, std::vector<std::string>>>& vocabularies) {
  std::vector<train::Task> tasks;
  for (const auto& tc : cfg.tasks) {
    std::vector<std::string> vocab;
    for (const auto& [name, v] : vocabularies) {
      if (name == tc.name) vocab = v;
    }
    const bool classifier = heads::is_classification(tc.head.kind);
    train::Task task;
    task.name = tc.name;
    task.head = tc.head;
    task.weight = tc.weight;
    task.data = train::load_dataset(tc.data_manifest(), cfg.data.sample_rate,
                                    classifier ? vocab : std::vector<std::string>{},
                                    tc.split, classifier);
    if (!classifier) task.data.vocabulary.clear();
    tasks.push_back(std::move(task));
  }
  return tasks;
}

}  // namespace wavetrunk::cli
