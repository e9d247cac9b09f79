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


// Run configuration: a strict JSON document. Every key is optional and
// falls back to the full-scale defaults; unknown keys and keys that do not
// apply to a head kind are rejected with their path. Relative paths are
// resolved against the directory of the configuration file.
//
//   {
//     "trunk": {"blocks": 3, "layers": 6, "channels": 64},
//     "tasks": [{"kind": "tagging", "manifest": "train.csv", ...}],
//     "train": {"batch_size": 48, "epochs": 10, "seed": 0,
//               "clip_seconds": 2.0, "trunk_lr": 3e-4,
//               "schedule": {"epochs_per_step": 5, "multiplier": 0.95},
//               "adam": {"beta0": 0.9, "beta1": 0.99, "epsilon": 1e-8},
//               "workers": 1, "freeze_trunk": false},
//     "data": {"sample_rate": 16000, "pre_emphasis": 0.97,
//              "rms_target": 0.1, "denoise_snr_range": [10, 15],
//              "noise_bank": "noise/",
//              "augment": {"enabled": false, "pitch_prob": 0.5,
//                          "pitch_range": 2, "noise_prob": 0.5,
//                          "snr_range": [10, 15]}},
//     "io": {"checkpoint_dir": "run", "log_path": "run/train_log.csv",
//            "checkpoint_every": 1}
//   }

#ifndef WAVETRUNK_TOOLS_CLI_RUN_CONFIG_H_
#define WAVETRUNK_TOOLS_CLI_RUN_CONFIG_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wavetrunk/heads/heads.h"
#include "wavetrunk/train/trainer.h"
#include "wavetrunk/trunk.h"

namespace wavetrunk::cli {

struct TaskConfig {
  std::string name;  // defaults to the kind
  heads::HeadSpec head;
  double weight = 1.0;
  std::string manifest;
  // Self-supervised tasks read this corpus instead of `manifest` when set.
  std::string unlabeled_manifest;
  std::string split = "train";  // empty selects every row

  const std::string& data_manifest() const {
    return unlabeled_manifest.empty() ? manifest : unlabeled_manifest;
  }
};

struct IoConfig {
  std::string checkpoint_dir = "wavetrunk_run";
  std::string log_path;  // empty: <checkpoint_dir>/train_log.csv
  std::uint64_t checkpoint_every = 1;
};

struct RunConfig {
  TrunkConfig trunk;
  bool trunk_given = false;
  std::vector<TaskConfig> tasks;
  train::TrainConfig train;
  train::DataConfig data;
  IoConfig io;

  // Throws ConfigError.
  static RunConfig parse(const std::string& text, const std::string& base_dir,
                         const std::string& source);
  static RunConfig load(const std::string& path);

  std::string log_path() const;
  // TrainConfig with the io settings folded in.
  train::TrainConfig train_config() const;
};

// Loads every task's dataset. Classification vocabularies come from the
// manifest unless `vocabularies` supplies one for the task name.
std::vector<train::Task> load_tasks(
    const RunConfig& cfg,
    const std::vector<std::pair<std::string, std::vector<std::string>>>&
        vocabularies = {});

}  // namespace wavetrunk::cli

#endif  // WAVETRUNK_TOOLS_CLI_RUN_CONFIG_H_
