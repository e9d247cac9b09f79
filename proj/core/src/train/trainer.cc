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


#include "wavetrunk/train/trainer.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <set>
#include <utility>
#include <stdexcept>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "train/streams.h"
#include "wavetrunk/errors.h"
#include "wavetrunk/ndgrad/losses.h"
#include "wavetrunk/ndgrad/tape.h"

namespace wavetrunk::train {

using json = nlohmann::json;
using ndgrad::Array;
using ndgrad::Mode;
using ndgrad::Shape;

namespace {

std::size_t clip_samples(double seconds, int rate) {
  return static_cast<std::size_t>(std::llround(seconds * rate));
}

bool uses_batch_norm(heads::HeadKind kind) {
  return kind == heads::HeadKind::kSpeakerId ||
         kind == heads::HeadKind::kSpeechCommand;
}

// Runs fn(i) for i in [0, n) on up to `workers` threads.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t workers, Fn fn) {
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::future<void>> jobs;
  for (std::size_t w = 0; w < workers; ++w) {
    jobs.push_back(std::async(std::launch::async, [&, w] {
      for (std::size_t i = w; i < n; i += workers) fn(i);
    }));
  }
  for (auto& j : jobs) j.get();
}

struct Batch {
  Array<float> input;
  Array<float> target;
  std::vector<std::size_t> labels;
};

Batch to_batch(const std::vector<Example>& examples) {
  const std::size_t b = examples.size(), len = examples.front().input.size();
  Batch out;
  out.input = Array<float>(Shape{b, 1, len});
  auto in = out.input.data();
  const bool has_target = !examples.front().target.empty();
  if (has_target) out.target = Array<float>(Shape{b, 1, len});
  for (std::size_t i = 0; i < b; ++i) {
    const Example& ex = examples[i];
    std::transform(ex.input.begin(), ex.input.end(), in.begin() + i * len,
                   [](double v) { return static_cast<float>(v); });
    if (has_target) {
      std::transform(ex.target.begin(), ex.target.end(),
                     out.target.data().begin() + i * len,
                     [](double v) { return static_cast<float>(v); });
    }
    out.labels.push_back(ex.label);
  }
  return out;
}

struct TaskOutcome {
  Array<float> loss;
  double metric_sum = 0.0;
  double metric_count = 0.0;
};

TaskOutcome task_forward(Model& model, std::size_t head_index,
                         const Batch& batch, Mode mode, Rng& rng) {
  heads::Head<float>& head = model.head(head_index);
  Array<float> out = head.forward(model.embed(batch.input), mode, rng);
  TaskOutcome r;
  const std::size_t b = batch.input.dim(0), len = batch.input.dim(2);
  if (heads::is_classification(head.kind())) {
    r.loss = ndgrad::softmax_cross_entropy(out, std::span<const std::size_t>(batch.labels));
    const std::size_t k = out.dim(1);
    std::span<const float> logits = std::as_const(out).data();
    for (std::size_t i = 0; i < b; ++i) {
      if (metrics::label_rank<float>(logits.subspan(i * k, k), batch.labels[i]) == 1) {
        r.metric_sum += 1.0;
      }
    }
    r.metric_count = static_cast<double>(b);
    return r;
  }
  auto pred = out.data();
  if (head.kind() == heads::HeadKind::kNextStep) {
    r.loss = heads::next_step_loss(out, batch.input, head.warmup());
    auto x = batch.input.data();
    for (std::size_t i = 0; i < b; ++i) {
      for (std::size_t t = head.warmup(); t + 1 < len; ++t) {
        r.metric_sum += std::abs(double(pred[i * len + t]) - x[i * len + t + 1]);
        r.metric_count += 1.0;
      }
    }
  } else {
    const std::size_t delay = head.delay();
    r.loss = heads::delayed_smooth_l1_loss(out, batch.target, delay);
    auto y = batch.target.data();
    for (std::size_t i = 0; i < b; ++i) {
      for (std::size_t t = delay; t < len; ++t) {
        r.metric_sum += std::abs(double(pred[i * len + t]) - y[i * len + t - delay]);
        r.metric_count += 1.0;
      }
    }
  }
  return r;
}

std::string moment_name(const std::string& group, const char* which,
                        const std::string& param) {
  return "optim/" + group + "/" + which + "/" + param;
}

void copy_into(const CheckpointTensor& t, Array<float>& dst) {
  std::copy(t.f32.begin(), t.f32.end(), dst.data().begin());
}

std::string describe(const CheckpointTensor* t) {
  return t ? ndgrad::shape_string(t->shape) : std::string("missing");
}

// Checks that every named tensor exists with the right dtype and shape.
void validate_tensors(const Checkpoint& ckpt,
                      const std::vector<std::pair<std::string, Shape>>& expected,
                      DType dtype, std::vector<std::string>& problems) {
  for (const auto& [name, shape] : expected) {
    const CheckpointTensor* t = ckpt.find(name);
    if (!t) {
      problems.push_back("missing " + name);
    } else if (t->dtype != dtype || t->shape != shape) {
      problems.push_back(name + " has shape " + describe(t) + ", expected " +
                         ndgrad::shape_string(shape));
    }
  }
}

void throw_problems(const std::vector<std::string>& problems) {
  if (problems.empty()) return;
  std::string msg = "checkpoint does not match the model:";
  for (const auto& p : problems) msg += "\n  " + p;
  throw CheckpointError(msg);
}

std::vector<std::pair<std::string, Shape>> expectations(
    const std::vector<ndgrad::NamedParameter<float>>& params) {
  std::vector<std::pair<std::string, Shape>> out;
  for (const auto& p : params) out.emplace_back(p.name, p.value.shape());
  return out;
}

}  // namespace

void TrainConfig::validate() const {
  if (batch_size == 0) throw ConfigError("train.batch_size must be positive");
  if (!(clip_seconds > 0.0) || !std::isfinite(clip_seconds)) {
    throw ConfigError("train.clip_seconds must be positive");
  }
  if (!(trunk_lr > 0.0) || !std::isfinite(trunk_lr)) {
    throw ConfigError("train.trunk_lr must be positive");
  }
  if (workers == 0) throw ConfigError("train.workers must be positive");
  if (checkpoint_every == 0) throw ConfigError("io.checkpoint_every must be positive");
  try {
    schedule.validate();
    adam.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("train: ") + e.what());
  }
}

Trainer::Trainer(Model& model, std::vector<Task> tasks, TrainConfig config,
                 DataConfig data, audio::NoiseBank noise)
    : model_(model),
      tasks_(std::move(tasks)),
      config_(std::move(config)),
      data_(std::move(data)),
      noise_(std::move(noise)) {
  config_.validate();
  data_.validate();
  if (tasks_.empty()) throw ConfigError("no tasks to train");
  std::set<std::string> names;
  std::size_t largest = 0;
  const std::size_t len = clip_samples(config_.clip_seconds, data_.sample_rate);
  for (const Task& task : tasks_) {
    if (!names.insert(task.name).second) {
      throw ConfigError("duplicate task name '" + task.name + "'");
    }
    const std::size_t h = model_.head_index(task.name);
    const heads::Head<float>& head = model_.head(h);
    if (head.kind() != task.head.kind ||
        (task.head.num_classes != 0 && task.head.num_classes != head.spec().num_classes)) {
      throw ConfigError("task '" + task.name + "' (" +
                        std::string(heads::to_string(task.head.kind)) + ", " +
                        std::to_string(task.head.num_classes) +
                        " classes) does not match the model head (" +
                        std::string(heads::to_string(head.kind())) + ", " +
                        std::to_string(head.spec().num_classes) + " classes)");
    }
    if (!(task.weight >= 0.0) || !std::isfinite(task.weight)) {
      throw ConfigError("task '" + task.name + "': weight must be finite and >= 0");
    }
    if (task.data.size() < config_.batch_size) {
      throw std::invalid_argument("task '" + task.name + "': dataset has " +
                                  std::to_string(task.data.size()) +
                                  " clips, fewer than one batch of " +
                                  std::to_string(config_.batch_size));
    }
    if (heads::is_classification(head.kind())) {
      for (const auto& clip : task.data.clips) {
        if (!clip.label || *clip.label >= head.spec().num_classes) {
          throw DataError("task '" + task.name + "': clip '" + clip.source_id +
                          "' has a missing or out-of-range label");
        }
      }
    }
    if (uses_batch_norm(head.kind()) && config_.batch_size < 2) {
      throw ConfigError("task '" + task.name +
                        "': batch norm needs batch_size >= 2");
    }
    if (len < head.min_length()) {
      throw ConfigError("task '" + task.name + "': clips of " + std::to_string(len) +
                        " samples are shorter than the head's minimum of " +
                        std::to_string(head.min_length()));
    }
    head_of_task_.push_back(h);
    largest = std::max(largest, task.data.size());
  }
  steps_per_epoch_ = (largest + config_.batch_size - 1) / config_.batch_size;

  ndgrad::AdamConfig adam = config_.adam;
  adam.step_count = 0;
  model_.set_trunk_trainable(!config_.freeze_trunk);
  if (!config_.freeze_trunk) {
    adam.lr = config_.trunk_lr;
    groups_.push_back({"trunk", config_.trunk_lr,
                       ndgrad::AdamOptimizer<float>(model_.trunk_parameters(), adam)});
  }
  for (std::size_t t = 0; t < tasks_.size(); ++t) {
    const double lr = model_.head(head_of_task_[t]).spec().lr;
    adam.lr = lr;
    groups_.push_back({tasks_[t].name, lr,
                       ndgrad::AdamOptimizer<float>(
                           model_.head_parameters(head_of_task_[t]), adam)});
  }
}

const std::vector<std::size_t>& Trainer::permutation(std::size_t task,
                                                     std::uint64_t epoch) {
  auto it = perms_.find(task);
  if (it != perms_.end() && it->second.first == epoch) return it->second.second;
  std::vector<std::size_t> perm(tasks_[task].data.size());
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
  Rng rng(derive_seed(config_.seed, {kStreamShuffle, task, epoch}));
  for (std::size_t i = perm.size(); i > 1; --i) {
    const auto j = std::min(i - 1, static_cast<std::size_t>(uniform01(rng) * i));
    std::swap(perm[i - 1], perm[j]);
  }
  auto& slot = perms_[task];
  slot = {epoch, std::move(perm)};
  return slot.second;
}

std::vector<Example> Trainer::batch_examples(std::size_t task,
                                             std::uint64_t epoch,
                                             std::uint64_t step) {
  const Task& t = tasks_.at(task);
  const std::vector<std::size_t>& perm = permutation(task, epoch);
  const std::size_t b = config_.batch_size;
  std::vector<Example> out(b);
  const heads::HeadKind kind = model_.head(head_of_task_[task]).kind();
  parallel_for(b, config_.workers, [&](std::size_t j) {
    const std::uint64_t position = step * b + j;
    Rng rng(derive_seed(config_.seed, {kStreamSample, task, epoch, position}));
    out[j] = prepare_example(kind, t.data.clips[perm[position % perm.size()]], data_,
                             config_.clip_seconds, true, noise_, rng);
  });
  return out;
}

StepResult Trainer::step(std::uint64_t epoch, std::uint64_t step) {
  const std::size_t n = tasks_.size();
  std::vector<Batch> batches;
  for (std::size_t t = 0; t < n; ++t) batches.push_back(to_batch(batch_examples(t, epoch, step)));

  StepResult r;
  r.losses.assign(n, 0.0);
  r.metric_sum.assign(n, 0.0);
  r.metric_count.assign(n, 0.0);
  auto run = [&](std::size_t t) {
    Rng rng(derive_seed(config_.seed, {kStreamDropout, t, epoch, step}));
    TaskOutcome o = task_forward(model_, head_of_task_[t], batches[t], Mode::kTrain, rng);
    const double loss = o.loss.item();
    if (!std::isfinite(loss)) {
      throw std::runtime_error("non-finite loss in task '" + tasks_[t].name +
                               "' at epoch " + std::to_string(epoch) + " step " +
                               std::to_string(step));
    }
    r.losses[t] = loss;
    r.metric_sum[t] = o.metric_sum;
    r.metric_count[t] = o.metric_count;
    return o.loss;
  };

  for (auto& g : groups_) g.adam.zero_grad();
  // Tasks with zero weight are evaluated for the log but stay off the tape.
  for (std::size_t t = 0; t < n; ++t) {
    if (tasks_[t].weight == 0.0) run(t);
  }
  {
    ndgrad::Tape<float> tape;
    ndgrad::TapeScope<float> scope(tape);
    Array<float> total;
    for (std::size_t t = 0; t < n; ++t) {
      if (tasks_[t].weight == 0.0) continue;
      Array<float> term = run(t);
      if (tasks_[t].weight != 1.0) {
        term = ndgrad::scale(term, static_cast<float>(tasks_[t].weight));
      }
      total = total.defined() ? ndgrad::add(total, term) : term;
    }
    if (total.defined()) {
      r.total = total.item();
      tape.backward(total);
    }
  }
  for (std::size_t t = 0; t < n; ++t) r.weighted_sum += tasks_[t].weight * r.losses[t];
  max_total_error_ = std::max(max_total_error_, std::abs(r.total - r.weighted_sum));

  for (auto& g : groups_) {
    g.adam.step(config_.schedule.effective_lr(g.base_lr, epoch));
  }
  for (auto& g : groups_) g.adam.zero_grad();
  return r;
}

std::vector<EpochRow> Trainer::run_epoch(std::uint64_t epoch) {
  const std::size_t n = tasks_.size();
  std::vector<double> loss(n, 0.0), msum(n, 0.0), mcount(n, 0.0);
  for (std::uint64_t s = 0; s < steps_per_epoch_; ++s) {
    StepResult r = step(epoch, s);
    for (std::size_t t = 0; t < n; ++t) {
      loss[t] += r.losses[t];
      msum[t] += r.metric_sum[t];
      mcount[t] += r.metric_count[t];
    }
  }
  std::vector<EpochRow> rows;
  for (std::size_t t = 0; t < n; ++t) {
    EpochRow row;
    row.epoch = epoch;
    row.task = tasks_[t].name;
    row.loss = loss[t] / static_cast<double>(steps_per_epoch_);
    row.metric = mcount[t] > 0 ? msum[t] / mcount[t] : 0.0;
    row.lr = config_.schedule.effective_lr(model_.head(head_of_task_[t]).spec().lr, epoch);
    spdlog::info("epoch {} task {} loss {:.6g} metric {:.6g} lr {:.6g}", epoch, row.task,
                 row.loss, row.metric, row.lr);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<EpochRow> Trainer::fit(const EpochCallback& on_epoch) {
  namespace fs = std::filesystem;
  std::ofstream log;
  if (!config_.log_path.empty()) {
    const fs::path p(config_.log_path);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::error_code ec;
    const bool append = next_epoch_ > 0 && fs::exists(p, ec) && fs::file_size(p, ec) > 0;
    log.open(p, append ? std::ios::app : std::ios::trunc);
    if (!log) throw std::runtime_error("I/O error opening log '" + config_.log_path + "'");
    if (!append) log << format_log_header();
    log.flush();
  }
  if (!config_.checkpoint_dir.empty()) fs::create_directories(config_.checkpoint_dir);

  auto save = [&](const std::string& file) {
    try {
      write_checkpoint((fs::path(config_.checkpoint_dir) / file).string(), checkpoint());
    } catch (...) {
      if (log.is_open()) log.flush();
      throw;
    }
  };

  std::vector<EpochRow> all;
  while (next_epoch_ < config_.epochs) {
    const std::uint64_t epoch = next_epoch_;
    std::vector<EpochRow> rows = run_epoch(epoch);
    if (log.is_open()) {
      for (const auto& row : rows) log << format_log_row(row);
      log.flush();
      if (!log) throw std::runtime_error("I/O error writing log '" + config_.log_path + "'");
    }
    ++next_epoch_;
    if (!config_.checkpoint_dir.empty() &&
        (next_epoch_ % config_.checkpoint_every == 0 || next_epoch_ == config_.epochs)) {
      char name[32];
      std::snprintf(name, sizeof(name), "epoch_%04llu.wtrk",
                    static_cast<unsigned long long>(next_epoch_));
      save(name);
    }
    all.insert(all.end(), rows.begin(), rows.end());
    if (on_epoch && !on_epoch(epoch, rows)) break;
  }
  if (!config_.checkpoint_dir.empty()) save("last.wtrk");
  return all;
}

std::string Trainer::config_json() const {
  json tasks = json::array();
  for (const auto& t : tasks_) tasks.push_back({{"name", t.name}, {"weight", t.weight}});
  json j = {
      {"model", json::parse(model_.spec().to_json())},
      {"train",
       {{"batch_size", config_.batch_size},
        {"seed", config_.seed},
        {"clip_seconds", config_.clip_seconds},
        {"trunk_lr", config_.trunk_lr},
        {"freeze_trunk", config_.freeze_trunk},
        {"tasks", tasks}}},
      {"data",
       {{"sample_rate", data_.sample_rate},
        {"pre_emphasis", data_.pre_emphasis},
        {"rms_target", data_.rms_target}}},
  };
  return j.dump();
}

Checkpoint Trainer::checkpoint() const {
  Checkpoint c;
  c.epoch = next_epoch_;
  c.config_json = config_json();
  for (const auto& p : model_.named_tensors()) c.add_f32(p.name, p.value);
  for (const auto& g : groups_) {
    c.add_i64("optim/" + g.name + "/step",
              static_cast<std::int64_t>(g.adam.config().step_count));
    const auto& params = g.adam.parameters();
    const auto& moments = g.adam.moments();
    for (std::size_t i = 0; i < params.size(); ++i) {
      const std::size_t n = params[i].value.size();
      const bool fresh = i >= moments.size() || moments[i].first.empty();
      c.add_f32(moment_name(g.name, "m", params[i].name), params[i].value.shape(),
                fresh ? std::vector<float>(n, 0.0f) : moments[i].first);
      c.add_f32(moment_name(g.name, "v", params[i].name), params[i].value.shape(),
                fresh ? std::vector<float>(n, 0.0f) : moments[i].second);
    }
  }
  return c;
}

void Trainer::resume(const Checkpoint& ckpt) {
  const ModelSpec saved = checkpoint_model_spec(ckpt);
  if (saved.to_json() != model_.spec().to_json()) {
    throw ConfigError("checkpoint was written for a different model structure");
  }
  std::vector<std::string> problems;
  validate_tensors(ckpt, expectations(model_.named_tensors()), DType::kF32, problems);
  for (const auto& g : groups_) {
    std::vector<std::pair<std::string, Shape>> moments;
    for (const auto& p : g.adam.parameters()) {
      moments.emplace_back(moment_name(g.name, "m", p.name), p.value.shape());
      moments.emplace_back(moment_name(g.name, "v", p.name), p.value.shape());
    }
    validate_tensors(ckpt, moments, DType::kF32, problems);
    validate_tensors(ckpt, {{"optim/" + g.name + "/step", Shape{1}}}, DType::kI64, problems);
  }
  throw_problems(problems);

  restore_model(ckpt, model_);
  for (auto& g : groups_) {
    std::vector<ndgrad::AdamMoments<float>> moments;
    for (const auto& p : g.adam.parameters()) {
      moments.push_back({ckpt.find(moment_name(g.name, "m", p.name))->f32,
                         ckpt.find(moment_name(g.name, "v", p.name))->f32});
    }
    const auto step = ckpt.find("optim/" + g.name + "/step")->i64.front();
    g.adam.set_state(std::move(moments), static_cast<std::uint64_t>(step));
  }
  next_epoch_ = ckpt.epoch;
  perms_.clear();
}

std::string format_log_header() { return "epoch,task,loss,metric,lr\n"; }

std::string format_log_row(const EpochRow& row) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%llu,%s,%.9g,%.9g,%.9g\n",
                static_cast<unsigned long long>(row.epoch), row.task.c_str(), row.loss,
                row.metric, row.lr);
  return buf;
}

ModelSpec checkpoint_model_spec(const Checkpoint& ckpt) {
  json j;
  try {
    j = json::parse(ckpt.config_json);
  } catch (const json::exception& e) {
    throw CheckpointError(std::string("checkpoint config is not valid JSON: ") + e.what());
  }
  if (!j.contains("model")) throw CheckpointError("checkpoint config lacks a model entry");
  return ModelSpec::from_json(j.at("model").dump());
}

void restore_model(const Checkpoint& ckpt, Model& model) {
  auto tensors = model.named_tensors();
  std::vector<std::string> problems;
  validate_tensors(ckpt, expectations(tensors), DType::kF32, problems);
  throw_problems(problems);
  for (auto& p : tensors) copy_into(*ckpt.find(p.name), p.value);
}

void restore_trunk(const Checkpoint& ckpt, Model& model) {
  if (checkpoint_model_spec(ckpt).trunk != model.trunk_config()) {
    throw ConfigError("checkpoint trunk configuration differs from the model's");
  }
  auto tensors = model.trunk_parameters();
  std::vector<std::string> problems;
  validate_tensors(ckpt, expectations(tensors), DType::kF32, problems);
  throw_problems(problems);
  for (auto& p : tensors) copy_into(*ckpt.find(p.name), p.value);
}

Model model_from_checkpoint(const Checkpoint& ckpt) {
  Model model(checkpoint_model_spec(ckpt), 0);
  restore_model(ckpt, model);
  return model;
}

std::vector<float> predict_logits(Model& model, std::size_t head,
                                  const Dataset& data, const DataConfig& cfg,
                                  double clip_seconds, std::uint64_t seed,
                                  std::size_t batch_size) {
  const heads::Head<float>& h = model.head(head);
  if (!heads::is_classification(h.kind())) {
    throw ConfigError("head '" + model.head_name(head) + "' is not a classifier");
  }
  if (data.size() == 0) throw DataError("no clips to evaluate");
  batch_size = std::max<std::size_t>(1, batch_size);
  const std::size_t k = h.spec().num_classes;
  const audio::NoiseBank no_noise;
  std::vector<float> logits;
  logits.reserve(data.size() * k);
  Rng unused(0);
  for (std::size_t start = 0; start < data.size(); start += batch_size) {
    const std::size_t end = std::min(data.size(), start + batch_size);
    std::vector<Example> examples;
    for (std::size_t i = start; i < end; ++i) {
      Rng rng(derive_seed(seed, {kStreamEval, i}));
      audio::AudioClip x =
          preprocess_clip(data.clips[i], cfg, clip_seconds, false, no_noise, rng);
      examples.push_back({std::move(x.samples), {}, 0});
    }
    Batch batch = to_batch(examples);
    Array<float> out = model.head(head).forward(model.embed(batch.input), Mode::kEval, unused);
    auto d = out.data();
    logits.insert(logits.end(), d.begin(), d.end());
  }
  return logits;
}

metrics::EvalResult evaluate(Model& model, std::size_t head,
                             const Dataset& data, const DataConfig& cfg,
                             double clip_seconds, std::uint64_t seed,
                             std::size_t batch_size) {
  const std::vector<float> logits =
      predict_logits(model, head, data, cfg, clip_seconds, seed, batch_size);
  const std::size_t k = model.head(head).spec().num_classes;
  std::vector<std::size_t> labels;
  for (const auto& clip : data.clips) {
    if (!clip.label || *clip.label >= k) {
      throw DataError("clip '" + clip.source_id + "' has a missing or out-of-range label");
    }
    labels.push_back(*clip.label);
  }
  return metrics::evaluate_logits<float>(model.head_name(head), logits, k, labels);
}

ModelSpec make_model_spec(const TrunkConfig& trunk, const std::vector<Task>& tasks) {
  ModelSpec spec;
  spec.trunk = trunk;
  for (const auto& t : tasks) {
    TaskHead h{t.name, t.head, {}};
    if (heads::is_classification(t.head.kind)) {
      const std::size_t vocab = t.data.vocabulary.size();
      if (h.spec.num_classes == 0) h.spec.num_classes = vocab;
      if (vocab != 0 && vocab != h.spec.num_classes) {
        throw ConfigError("task '" + t.name + "': data has " + std::to_string(vocab) +
                          " classes but the head declares " +
                          std::to_string(h.spec.num_classes));
      }
      h.labels = t.data.vocabulary;
    }
    spec.heads.push_back(std::move(h));
  }
  spec.validate();
  return spec;
}

TransferResult pretrain_then_finetune(const TrunkConfig& trunk,
                                      StageConfig pretrain,
                                      StageConfig finetune,
                                      const DataConfig& data,
                                      const audio::NoiseBank& noise) {
  for (const auto& t : pretrain.tasks) {
    if (heads::is_classification(t.head.kind)) {
      throw ConfigError("pretraining takes self-supervised tasks only; '" + t.name +
                        "' is supervised");
    }
  }
  if (std::none_of(finetune.tasks.begin(), finetune.tasks.end(),
                   [](const Task& t) { return heads::is_classification(t.head.kind); })) {
    throw ConfigError("fine-tuning needs at least one supervised task");
  }
  TransferResult result;
  {
    Model stage1(make_model_spec(trunk, pretrain.tasks), pretrain.train.seed);
    Trainer trainer(stage1, std::move(pretrain.tasks), pretrain.train, data, noise);
    result.pretrain_log = trainer.fit();
    result.pretrained = trainer.checkpoint();
  }
  result.model = Model(make_model_spec(checkpoint_model_spec(result.pretrained).trunk,
                                       finetune.tasks),
                       finetune.train.seed);
  restore_trunk(result.pretrained, result.model);
  Trainer trainer(result.model, std::move(finetune.tasks), finetune.train, data, noise);
  result.finetune_log = trainer.fit();
  return result;
}

}  // namespace wavetrunk::train
