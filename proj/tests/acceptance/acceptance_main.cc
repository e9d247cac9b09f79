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


// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit when any
// criterion fails. Training criteria run on a synthetic corpus in --workdir.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#ifdef __GLIBC__
#include <malloc.h>
#endif

#include "CLI11.hpp"
#include "cli/commands.h"
#include "cli/verify.h"
#include "wavetrunk/audio/synth.h"
#include "wavetrunk/train/checkpoint.h"
#include "wavetrunk/train/trainer.h"

namespace wavetrunk::acceptance {
namespace {

namespace fs = std::filesystem;
using heads::HeadKind;
using heads::HeadSpec;

struct Verdict {
  bool passed = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, v);
  return buf;
}

// Verify-suite checks by name.
class Checks {
 public:
  void run(const std::string& suite) {
    const auto start = Clock::now();
    for (auto& r : cli::run_verify(suite, {})) results_[r.name] = r;
    suite_seconds_[suite] = seconds_since(start);
  }
  double suite_seconds(const std::string& suite) const { return suite_seconds_.at(suite); }

  Verdict require(const std::vector<std::string>& names) const {
    Verdict v{true, ""};
    for (const auto& n : names) {
      auto it = results_.find(n);
      const bool ok = it != results_.end() && it->second.passed;
      v.passed = v.passed && ok;
      if (!ok) v.detail += n + (it == results_.end() ? " missing; " : " failed (" + it->second.detail + "); ");
    }
    return v;
  }
  Verdict require_prefix(const std::string& suite, const std::string& prefix) const {
    std::vector<std::string> names;
    for (const auto& [n, r] : results_) {
      if (r.suite == suite && n.rfind(prefix, 0) == 0) names.push_back(n);
    }
    Verdict v = require(names);
    if (names.empty()) v = {false, "no checks"};
    return v;
  }
  std::string detail(const std::string& name) const { return results_.at(name).detail; }

 private:
  std::map<std::string, cli::CheckResult> results_;
  std::map<std::string, double> suite_seconds_;
};

std::vector<unsigned char> tensor_bytes(const ndgrad::Array<float>& a) {
  const auto* p = reinterpret_cast<const unsigned char*>(a.data().data());
  return {p, p + a.size() * sizeof(float)};
}

double max_abs_diff(const train::Model& a, const train::Model& b) {
  const auto ta = a.named_tensors(), tb = b.named_tensors();
  if (ta.size() != tb.size()) return INFINITY;
  double worst = 0.0;
  for (std::size_t i = 0; i < ta.size(); ++i) {
    if (ta[i].name != tb[i].name || ta[i].value.size() != tb[i].value.size()) return INFINITY;
    for (std::size_t k = 0; k < ta[i].value.size(); ++k) {
      worst = std::max(worst, std::abs(static_cast<double>(ta[i].value.data()[k]) -
                                       tb[i].value.data()[k]));
    }
  }
  return worst;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

class Runner {
 public:
  explicit Runner(fs::path workdir) : work_(std::move(workdir)) {}

  void prepare() {
    fs::remove_all(work_);
    fs::create_directories(work_);
    audio::SynthConfig s;
    s.classes = 4;
    s.clips_per_class = 8;
    s.unlabeled_clips = 32;
    s.seconds = 2.0;
    s.seed = 0;
    audio::write_corpus(audio::synthesize(s), corpus());
  }

  std::string corpus(const std::string& file = "") const {
    return file.empty() ? (work_ / "corpus").string() : (work_ / "corpus" / file).string();
  }

  train::Dataset labeled() const {
    return train::load_dataset(corpus("labeled.csv"), 16000, {}, "train", true);
  }
  train::Dataset unlabeled() const {
    return train::load_dataset(corpus("unlabeled.csv"), 16000);
  }

  Verdict overfit() const {
    const auto start = Clock::now();
    train::Dataset data = labeled();
    HeadSpec tag = HeadSpec::defaults(HeadKind::kTagging);
    tag.num_classes = data.vocabulary.size();
    tag.lr = 1e-3;
    std::vector<train::Task> tasks = {{"tagging", tag, 1.0, data}};
    train::Model model(train::make_model_spec(TrunkConfig{2, 4, 32}, tasks), 1);
    train::TrainConfig cfg;
    cfg.batch_size = 8;
    cfg.epochs = 200;
    cfg.seed = 1;
    cfg.clip_seconds = 2.0;
    cfg.trunk_lr = 1e-3;
    train::DataConfig dcfg;
    train::Trainer trainer(model, tasks, cfg, dcfg);
    double top1 = 0.0;
    std::uint64_t epochs = 0;
    trainer.fit([&](std::uint64_t epoch, const std::vector<train::EpochRow>& rows) {
      epochs = epoch + 1;
      if (rows.front().metric < 1.0) return true;
      top1 = train::evaluate(model, 0, data, dcfg, cfg.clip_seconds, cfg.seed, cfg.batch_size).top1;
      return top1 < 1.0;
    });
    const double secs = seconds_since(start);
    return {top1 == 1.0 && secs < 300.0,
            "train top1 " + fmt("%.4f", top1) + " after " + std::to_string(epochs) +
                " epochs in " + fmt("%.1f", secs) + " s (limit 200 epochs, 300 s)"};
  }

  Verdict multitask() const {
    const auto start = Clock::now();
    train::Dataset lab = labeled(), unl = unlabeled();
    unl.vocabulary.clear();
    HeadSpec tag = HeadSpec::defaults(HeadKind::kTagging);
    tag.num_classes = lab.vocabulary.size();
    tag.hidden_units = 64;
    tag.lr = 1e-3;
    std::vector<train::Task> tasks = {{"tagging", tag, 1.0, lab}};
    const std::vector<std::pair<HeadKind, double>> ssl = {
        {HeadKind::kNextStep, 1.0}, {HeadKind::kDenoise, 0.5}, {HeadKind::kUpsample, 0.5}};
    for (const auto& [kind, weight] : ssl) {
      HeadSpec h = HeadSpec::defaults(kind);
      h.hidden_units = 32;
      tasks.push_back({std::string(heads::to_string(kind)), h, weight, unl});
    }
    train::Model model(train::make_model_spec(TrunkConfig{2, 4, 16}, tasks), 2);
    train::TrainConfig cfg;
    cfg.batch_size = 8;
    cfg.epochs = 50;
    cfg.seed = 2;
    cfg.clip_seconds = 0.25;
    cfg.trunk_lr = 1e-3;
    train::Trainer trainer(model, tasks, cfg, train::DataConfig{});
    const auto rows = trainer.fit();
    std::map<std::string, std::pair<double, double>> first_last;
    for (const auto& r : rows) {
      auto it = first_last.find(r.task);
      if (it == first_last.end()) first_last[r.task] = {r.loss, r.loss};
      else it->second.second = r.loss;
    }
    Verdict v{rows.size() == 50 * tasks.size(), ""};
    for (const auto& t : tasks) {
      const auto [first, last] = first_last[t.name];
      const double ratio = last / first;
      v.passed = v.passed && std::isfinite(ratio) && ratio < 0.9;
      v.detail += t.name + " " + fmt("%.3f", ratio) + ", ";
    }
    v.passed = v.passed && trainer.max_total_error() <= 1e-6;
    v.detail = "last/first loss: " + v.detail + "max |total - sum| " +
               fmt("%.2e", trainer.max_total_error()) + ", " + fmt("%.1f", seconds_since(start)) + " s";
    return v;
  }

  Verdict transfer() const {
    const fs::path dir = work_ / "transfer";
    fs::create_directories(dir);
    const std::string rel = fs::relative(corpus(), dir).string();
    std::ofstream(dir / "pretrain.json") << R"({
      "trunk": {"blocks": 2, "layers": 4, "channels": 16},
      "tasks": [
        {"kind": "next_step", "manifest": ")" << rel << R"(/unlabeled.csv", "hidden_units": 32},
        {"kind": "denoise", "manifest": ")" << rel << R"(/unlabeled.csv", "hidden_units": 32},
        {"kind": "upsample", "manifest": ")" << rel << R"(/unlabeled.csv", "hidden_units": 32}],
      "train": {"batch_size": 8, "epochs": 10, "seed": 3, "clip_seconds": 0.25,
                "trunk_lr": 1e-3}
    })";
    std::ofstream(dir / "finetune.json") << R"({
      "tasks": [{"kind": "tagging", "manifest": ")" << rel << R"(/labeled.csv",
                 "hidden_units": 64, "lr": 1e-2}],
      "train": {"batch_size": 8, "epochs": 10, "seed": 4, "clip_seconds": 0.5,
                "freeze_trunk": true}
    })";
    std::ostringstream out, err;
    int code = cli::run({"pretrain", "--config", (dir / "pretrain.json").string(), "--out",
                         (dir / "stage1").string()},
                        out, err);
    if (code != 0) return {false, "pretrain exit " + std::to_string(code) + ": " + err.str()};
    const std::string stage1 = (dir / "stage1" / "last.wtrk").string();
    code = cli::run({"finetune", "--config", (dir / "finetune.json").string(), "--checkpoint",
                     stage1, "--out", (dir / "stage2").string()},
                    out, err);
    if (code != 0) return {false, "finetune exit " + std::to_string(code) + ": " + err.str()};

    const train::Checkpoint ck1 = train::read_checkpoint(stage1);
    const train::Checkpoint ck2 = train::read_checkpoint((dir / "stage2" / "last.wtrk").string());

    // Load path used by finetune: a fresh model with the stage-1 trunk restored.
    train::Model probe(train::checkpoint_model_spec(ck2), 99);
    train::restore_trunk(ck1, probe);
    bool loaded = true, frozen = true;
    std::size_t count = 0;
    for (const auto& p : probe.trunk_parameters()) {
      const train::CheckpointTensor* a = ck1.find(p.name);
      const train::CheckpointTensor* b = ck2.find(p.name);
      if (a == nullptr || b == nullptr) return {false, "missing trunk tensor " + p.name};
      const auto bytes = tensor_bytes(p.value);
      loaded = loaded && a->f32.size() * 4 == bytes.size() &&
               std::memcmp(a->f32.data(), bytes.data(), bytes.size()) == 0;
      frozen = frozen && a->f32.size() == b->f32.size() &&
               std::memcmp(a->f32.data(), b->f32.data(), a->f32.size() * 4) == 0;
      ++count;
    }

    std::istringstream log(read_file((dir / "stage2" / "train_log.csv").string()));
    std::string line;
    std::getline(log, line);
    std::vector<double> losses;
    while (std::getline(log, line)) {
      std::vector<std::string> f;
      std::stringstream ss(line);
      for (std::string c; std::getline(ss, c, ',');) f.push_back(c);
      if (f.size() == 5 && f[1] == "tagging") losses.push_back(std::stod(f[2]));
    }
    const double drop = losses.size() >= 2 ? 1.0 - losses.back() / losses.front() : 0.0;
    return {loaded && frozen && count > 0 && drop >= 0.10,
            std::to_string(count) + " trunk tensors, loaded bit-exact " +
                (loaded ? "yes" : "no") + ", frozen bit-unchanged " + (frozen ? "yes" : "no") +
                ", supervised loss drop " + fmt("%.1f%%", 100.0 * drop)};
  }

  Verdict determinism() const {
    train::Dataset lab = labeled(), unl = unlabeled();
    unl.vocabulary.clear();
    HeadSpec tag = HeadSpec::defaults(HeadKind::kTagging);
    tag.num_classes = lab.vocabulary.size();
    tag.hidden_units = 32;
    tag.lr = 1e-3;
    HeadSpec den = HeadSpec::defaults(HeadKind::kDenoise);
    den.hidden_units = 16;
    std::vector<train::Task> tasks = {{"tagging", tag, 1.0, lab}, {"denoise", den, 1.0, unl}};
    const train::ModelSpec spec = train::make_model_spec(TrunkConfig{1, 4, 8}, tasks);
    train::TrainConfig cfg;
    cfg.batch_size = 8;
    cfg.epochs = 4;
    cfg.seed = 5;
    cfg.clip_seconds = 0.25;

    auto train_run = [&](std::uint64_t epochs, const train::Checkpoint* from) {
      auto model = std::make_unique<train::Model>(spec, 5);
      train::TrainConfig c = cfg;
      c.epochs = epochs;
      train::Trainer t(*model, tasks, c, train::DataConfig{});
      if (from != nullptr) t.resume(*from);
      t.fit();
      return std::make_pair(std::move(model), t.checkpoint());
    };
    auto [m1, c1] = train_run(4, nullptr);
    auto [m2, c2] = train_run(4, nullptr);
    const bool reproducible = train::serialize(c1) == train::serialize(c2);

    const auto bytes = train::serialize(c1);
    const fs::path file = work_ / "determinism.wtrk";
    train::write_checkpoint(file.string(), c1);
    const train::Checkpoint back = train::read_checkpoint(file.string());
    train::Model restored = train::model_from_checkpoint(back);
    const bool round_trip = train::serialize(back) == bytes && max_abs_diff(*m1, restored) == 0.0;

    auto [m3, half] = train_run(2, nullptr);
    const train::Checkpoint half_back = train::deserialize(train::serialize(half), "half");
    auto [m4, c4] = train_run(4, &half_back);
    const double resume_diff = max_abs_diff(*m1, *m4);

    return {reproducible && round_trip && resume_diff <= 1e-12,
            std::string("repeat runs bit-identical ") + (reproducible ? "yes" : "no") +
                ", checkpoint round trip bit-exact " + (round_trip ? "yes" : "no") +
                ", resume max |diff| " + fmt("%.3e", resume_diff)};
  }

 private:
  fs::path work_;
};

int run_all(const std::string& workdir) {
  Checks checks;
  checks.run("gradcheck");
  checks.run("props");
  checks.run("dsp");

  Runner runner{fs::path(workdir)};
  runner.prepare();

  struct Criterion {
    int id;
    std::string title;
    std::function<Verdict()> body;
  };
  const std::vector<Criterion> criteria = {
      {1, "gradient check",
       [&] {
         Verdict v = checks.require_prefix("gradcheck", "");
         const double s = checks.suite_seconds("gradcheck");
         v.passed = v.passed && s < 120.0;
         v.detail += "suite time " + fmt("%.2f", s) + " s (limit 120 s)";
         return v;
       }},
      {2, "receptive field",
       [&] {
         Verdict v = checks.require_prefix("props", "receptive_field_");
         const double s = checks.suite_seconds("props");
         v.passed = v.passed && s < 60.0;
         v.detail += checks.detail("receptive_field_default") + ", suite time " +
                     fmt("%.2f", s) + " s (limit 60 s)";
         return v;
       }},
      {3, "causality",
       [&] {
         Verdict v = checks.require({"causality"});
         v.detail += checks.detail("causality");
         return v;
       }},
      {4, "loss formulas",
       [&] {
         Verdict v = checks.require(
             {"smooth_l1_values", "cross_entropy_uniform", "next_step_per_frame"});
         v.detail += "smooth-L1 " + checks.detail("smooth_l1_values") +
                     "; uniform CE vs ln C; per-frame next-step oracle";
         return v;
       }},
      {5, "dsp invariants",
       [&] {
         Verdict v = checks.require(
             {"mix_at_snr", "emphasis_round_trip", "upsample_pair_periodic", "resample_sine"});
         v.detail += checks.detail("mix_at_snr") + ", " + checks.detail("resample_sine");
         return v;
       }},
      {6, "overfit supervised", [&] { return runner.overfit(); }},
      {7, "multitask smoke", [&] { return runner.multitask(); }},
      {8, "transfer pipeline", [&] { return runner.transfer(); }},
      {9, "metrics oracle",
       [&] {
         Verdict v = checks.require({"metrics_brute_force", "map_at_3_random_expectation"});
         v.detail += checks.detail("metrics_brute_force") + ", MAP@3 " +
                     checks.detail("map_at_3_random_expectation");
         return v;
       }},
      {10, "determinism and persistence", [&] { return runner.determinism(); }},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    Verdict v;
    try {
      v = c.body();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failed += v.passed ? 0 : 1;
    std::cout << (v.passed ? "PASS" : "FAIL") << " criterion " << c.id << ": " << c.title
              << ": " << v.detail << std::endl;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed"
            << std::endl;
  return failed == 0 ? 0 : 1;
}

}  // namespace
}  // namespace wavetrunk::acceptance

int main(int argc, char** argv) {
#ifdef __GLIBC__
  mallopt(M_MMAP_THRESHOLD, 1 << 30);
  mallopt(M_TRIM_THRESHOLD, 1 << 30);
  mallopt(M_TOP_PAD, 256 << 20);
#endif
  CLI::App app{"WaveTrunk acceptance suite"};
  std::string workdir = (std::filesystem::temp_directory_path() / "wavetrunk_acceptance").string();
  app.add_option("--workdir", workdir, "Scratch directory for corpora and checkpoints");
  CLI11_PARSE(app, argc, argv);
  wavetrunk::cli::configure_logging();
  return wavetrunk::acceptance::run_all(workdir);
}
