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


#ifndef WAVETRUNK_TRAIN_TRAINER_H_
#define WAVETRUNK_TRAIN_TRAINER_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "wavetrunk/audio/noise_bank.h"
#include "wavetrunk/heads/heads.h"
#include "wavetrunk/metrics/metrics.h"
#include "wavetrunk/ndgrad/adam.h"
#include "wavetrunk/train/checkpoint.h"
#include "wavetrunk/train/data.h"
#include "wavetrunk/train/model.h"

namespace wavetrunk::train {

struct TrainConfig {
  std::size_t batch_size = 48;
  std::uint64_t epochs = 1;
  std::uint64_t seed = 0;
  double clip_seconds = 2.0;
  double trunk_lr = 3e-4;
  ndgrad::LrSchedule schedule;
  ndgrad::AdamConfig adam;  // betas and epsilon; lr comes from the groups
  std::size_t workers = 1;
  bool freeze_trunk = false;
  std::string checkpoint_dir;  // empty: no checkpoint files
  std::uint64_t checkpoint_every = 1;
  std::string log_path;  // empty: no CSV log

  void validate() const;
};

struct Task {
  std::string name;  // must match a model head
  heads::HeadSpec head;
  double weight = 1.0;
  Dataset data;
};

struct StepResult {
  std::vector<double> losses;  // per task
  double total = 0.0;          // scalar the backward pass started from
  double weighted_sum = 0.0;   // sum of weight * loss in double
  // Per task: correct predictions (classifiers) or summed absolute error
  // (regressors), and the count it is taken over.
  std::vector<double> metric_sum;
  std::vector<double> metric_count;
};

struct EpochRow {
  std::uint64_t epoch = 0;
  std::string task;
  double loss = 0.0;    // mean over the epoch's steps
  double metric = 0.0;  // train top-1 or mean absolute error
  double lr = 0.0;
};

struct OptimizerGroup {
  std::string name;
  double base_lr = 0.0;
  ndgrad::AdamOptimizer<float> adam;
};

// Return false to stop after this epoch.
using EpochCallback =
    std::function<bool(std::uint64_t epoch, const std::vector<EpochRow>& rows)>;

// Joint training of every task on a shared trunk: one weighted total loss,
// one backward pass, one Adam step per parameter group (the trunk and each
// head). Each task draws its own batch every step; a step count of
// ceil(largest dataset / batch size) makes an epoch, smaller datasets cycle.
//
// All randomness derives from (seed, task, epoch, position), so a run
// resumed from a checkpoint continues exactly like an uninterrupted one.
class Trainer {
 public:
  Trainer(Model& model, std::vector<Task> tasks, TrainConfig config,
          DataConfig data, audio::NoiseBank noise = {});

  std::uint64_t steps_per_epoch() const { return steps_per_epoch_; }
  std::uint64_t next_epoch() const { return next_epoch_; }
  const std::vector<Task>& tasks() const { return tasks_; }
  const std::vector<OptimizerGroup>& optimizers() const { return groups_; }
  const TrainConfig& config() const { return config_; }
  // Largest |total - weighted_sum| seen so far.
  double max_total_error() const { return max_total_error_; }

  StepResult step(std::uint64_t epoch, std::uint64_t step);
  std::vector<EpochRow> run_epoch(std::uint64_t epoch);
  // Runs epochs [next_epoch(), config.epochs), writing the CSV log and
  // checkpoints. Returns the rows produced by this call.
  std::vector<EpochRow> fit(const EpochCallback& on_epoch = {});

  Checkpoint checkpoint() const;
  // Restores parameters, optimizer state and the epoch counter. Every
  // tensor is validated before anything is modified.
  void resume(const Checkpoint& ckpt);

  // Model spec and training settings, stored in checkpoints.
  std::string config_json() const;

  // Examples for `task` at (epoch, step), as the trainer would use them.
  std::vector<Example> batch_examples(std::size_t task, std::uint64_t epoch,
                                      std::uint64_t step);

 private:
  const std::vector<std::size_t>& permutation(std::size_t task,
                                              std::uint64_t epoch);

  Model& model_;
  std::vector<Task> tasks_;
  std::vector<std::size_t> head_of_task_;
  TrainConfig config_;
  DataConfig data_;
  audio::NoiseBank noise_;
  std::vector<OptimizerGroup> groups_;
  std::uint64_t steps_per_epoch_ = 0;
  std::uint64_t next_epoch_ = 0;
  double max_total_error_ = 0.0;
  std::map<std::size_t, std::pair<std::uint64_t, std::vector<std::size_t>>> perms_;
};

std::string format_log_header();
std::string format_log_row(const EpochRow& row);

// Model structure recorded in a checkpoint.
ModelSpec checkpoint_model_spec(const Checkpoint& ckpt);
// Copies every model tensor after validating names and shapes.
void restore_model(const Checkpoint& ckpt, Model& model);
// Copies the trunk tensors only; throws CheckpointError listing missing ones.
void restore_trunk(const Checkpoint& ckpt, Model& model);
Model model_from_checkpoint(const Checkpoint& ckpt);

// Logits [N, K] of a classification head over a dataset, eval mode, no
// augmentation.
std::vector<float> predict_logits(Model& model, std::size_t head,
                                  const Dataset& data, const DataConfig& cfg,
                                  double clip_seconds, std::uint64_t seed,
                                  std::size_t batch_size);
metrics::EvalResult evaluate(Model& model, std::size_t head,
                             const Dataset& data, const DataConfig& cfg,
                             double clip_seconds, std::uint64_t seed,
                             std::size_t batch_size);

struct StageConfig {
  std::vector<Task> tasks;
  TrainConfig train;
};

struct TransferResult {
  Model model;
  Checkpoint pretrained;
  std::vector<EpochRow> pretrain_log;
  std::vector<EpochRow> finetune_log;
};

// Stage 1 trains a fresh trunk with self-supervised heads; stage 2 copies
// the stage-1 trunk into a model with the supervised heads and trains it,
// with the trunk frozen when finetune.train.freeze_trunk is set.
TransferResult pretrain_then_finetune(const TrunkConfig& trunk,
                                      StageConfig pretrain,
                                      StageConfig finetune,
                                      const DataConfig& data,
                                      const audio::NoiseBank& noise = {});

// Model spec for a set of tasks; classification vocabularies come from the
// tasks' datasets.
ModelSpec make_model_spec(const TrunkConfig& trunk,
                          const std::vector<Task>& tasks);

}  // namespace wavetrunk::train

#endif  // WAVETRUNK_TRAIN_TRAINER_H_
