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


#include "cli/commands.h"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <utility>

#include <nlohmann/json.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "cli/run_config.h"
#include "cli/verify.h"
#include "wavetrunk/audio/noise_bank.h"
#include "wavetrunk/audio/synth.h"
#include "wavetrunk/errors.h"
#include "wavetrunk/metrics/metrics.h"
#include "wavetrunk/train/checkpoint.h"
#include "wavetrunk/train/trainer.h"

namespace wavetrunk::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

struct Flags {
  std::string config;
  std::string resume;
  std::string checkpoint;
  std::string manifest;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
};

struct SynthFlags {
  std::size_t classes = 4;
  std::size_t clips_per_class = 8;
  std::size_t unlabeled = 32;
  double seconds = 2.0;
  double snr_db = 20.0;
};

struct VerifyFlags {
  std::string suite = "all";
  std::string corrupt_op;
};

RunConfig load_config(const Flags& flags) {
  if (flags.config.empty()) throw ConfigError("--config is required");
  RunConfig cfg = RunConfig::load(flags.config);
  if (flags.seed) cfg.train.seed = *flags.seed;
  if (flags.workers) {
    if (*flags.workers == 0) throw ConfigError("--workers must be positive");
    cfg.train.workers = *flags.workers;
  }
  if (!flags.out.empty()) {
    cfg.io.checkpoint_dir = flags.out;
    cfg.io.log_path = (fs::path(flags.out) / "train_log.csv").string();
  }
  if (cfg.tasks.empty()) throw ConfigError(flags.config + ": no tasks configured");
  return cfg;
}

audio::NoiseBank load_noise(const RunConfig& cfg) {
  if (cfg.data.noise_bank.empty()) return {};
  return audio::NoiseBank::from_directory(cfg.data.noise_bank, cfg.data.sample_rate);
}

// Class vocabularies stored in a checkpoint, keyed by head name.
std::vector<std::pair<std::string, std::vector<std::string>>> vocabularies(
    const train::ModelSpec& spec) {
  std::vector<std::pair<std::string, std::vector<std::string>>> v;
  for (const auto& h : spec.heads) {
    if (!h.labels.empty()) v.emplace_back(h.name, h.labels);
  }
  return v;
}

void report_run(std::ostream& out, const train::Trainer& trainer, const RunConfig& cfg) {
  out << "trained through epoch " << trainer.next_epoch() << " of " << cfg.train.epochs
      << "; checkpoint " << (fs::path(cfg.io.checkpoint_dir) / "last.wtrk").string()
      << "; log " << cfg.log_path() << "\n";
}

train::Checkpoint read_resume(const Flags& flags) {
  return train::read_checkpoint(flags.resume);
}

// Shared by train and pretrain.
int train_command(const Flags& flags, std::ostream& out, bool self_supervised_only) {
  RunConfig cfg = load_config(flags);
  if (self_supervised_only) {
    for (const auto& t : cfg.tasks) {
      if (heads::is_classification(t.head.kind)) {
        throw ConfigError("pretrain takes self-supervised tasks only; '" + t.name +
                          "' is supervised");
      }
    }
  }
  std::optional<train::Checkpoint> resume;
  std::vector<std::pair<std::string, std::vector<std::string>>> vocab;
  if (!flags.resume.empty()) {
    resume = read_resume(flags);
    vocab = vocabularies(train::checkpoint_model_spec(*resume));
  }
  std::vector<train::Task> tasks = load_tasks(cfg, vocab);
  train::Model model(train::make_model_spec(cfg.trunk, tasks), cfg.train.seed);
  train::Trainer trainer(model, std::move(tasks), cfg.train_config(), cfg.data, load_noise(cfg));
  if (resume) {
    trainer.resume(*resume);
    spdlog::info("resumed from {} at epoch {}", flags.resume, trainer.next_epoch());
  }
  spdlog::info("trunk with {} parameters, receptive field {}, {} steps per epoch",
               model.trunk().parameter_count(), model.receptive_field(),
               trainer.steps_per_epoch());
  trainer.fit();
  report_run(out, trainer, cfg);
  return kExitOk;
}

int finetune_command(const Flags& flags, std::ostream& out) {
  if (flags.checkpoint.empty()) throw ConfigError("finetune needs --checkpoint");
  RunConfig cfg = load_config(flags);
  const train::Checkpoint pretrained = train::read_checkpoint(flags.checkpoint);
  const TrunkConfig trunk = train::checkpoint_model_spec(pretrained).trunk;
  if (cfg.trunk_given && !(cfg.trunk == trunk)) {
    throw ConfigError("config trunk differs from the trunk in '" + flags.checkpoint + "'");
  }
  if (std::none_of(cfg.tasks.begin(), cfg.tasks.end(),
                   [](const TaskConfig& t) { return heads::is_classification(t.head.kind); })) {
    throw ConfigError("finetune needs at least one supervised task");
  }
  std::optional<train::Checkpoint> resume;
  std::vector<std::pair<std::string, std::vector<std::string>>> vocab;
  if (!flags.resume.empty()) {
    resume = read_resume(flags);
    vocab = vocabularies(train::checkpoint_model_spec(*resume));
  }
  std::vector<train::Task> tasks = load_tasks(cfg, vocab);
  train::Model model(train::make_model_spec(trunk, tasks), cfg.train.seed);
  train::restore_trunk(pretrained, model);
  train::Trainer trainer(model, std::move(tasks), cfg.train_config(), cfg.data, load_noise(cfg));
  if (resume) trainer.resume(*resume);
  spdlog::info("fine-tuning from {} with the trunk {}", flags.checkpoint,
               cfg.train.freeze_trunk ? "frozen" : "trainable");
  trainer.fit();
  report_run(out, trainer, cfg);
  return kExitOk;
}

// Data settings recorded in a checkpoint, for evaluation without a config.
void data_from_checkpoint(const train::Checkpoint& ckpt, train::DataConfig& data,
                          double& clip_seconds, std::size_t& batch_size) {
  const json j = json::parse(ckpt.config_json, nullptr, false);
  if (j.is_discarded()) throw CheckpointError("checkpoint config is not valid JSON");
  if (j.contains("data")) {
    const json& d = j["data"];
    data.sample_rate = d.value("sample_rate", data.sample_rate);
    data.pre_emphasis = d.value("pre_emphasis", data.pre_emphasis);
    data.rms_target = d.value("rms_target", data.rms_target);
  }
  if (j.contains("train")) {
    clip_seconds = j["train"].value("clip_seconds", clip_seconds);
    batch_size = j["train"].value("batch_size", batch_size);
  }
}

std::string head_shape(const heads::HeadSpec& spec) {
  return std::string(heads::to_string(spec.kind)) + " with " + std::to_string(spec.num_classes) +
         " classes";
}

int evaluate_command(const Flags& flags, std::ostream& out) {
  if (flags.checkpoint.empty()) throw ConfigError("evaluate needs --checkpoint");
  if (flags.config.empty() && flags.manifest.empty()) {
    throw ConfigError("evaluate needs --config or --manifest");
  }
  const train::Checkpoint ckpt = train::read_checkpoint(flags.checkpoint);
  train::Model model = train::model_from_checkpoint(ckpt);
  train::DataConfig data;
  double clip_seconds = 2.0;
  std::size_t batch_size = 16;
  data_from_checkpoint(ckpt, data, clip_seconds, batch_size);
  std::uint64_t seed = flags.seed.value_or(0);

  // (head index, manifest, split) to evaluate.
  struct Job {
    std::size_t head;
    std::string manifest;
    std::string split;
  };
  std::vector<Job> jobs;
  if (!flags.config.empty()) {
    const RunConfig cfg = RunConfig::load(flags.config);
    data = cfg.data;
    clip_seconds = cfg.train.clip_seconds;
    batch_size = cfg.train.batch_size;
    if (!flags.seed) seed = cfg.train.seed;
    for (const auto& t : cfg.tasks) {
      if (!heads::is_classification(t.head.kind)) continue;
      const std::size_t h = model.head_index(t.name);
      const heads::HeadSpec& have = model.head(h).spec();
      if (have.kind != t.head.kind ||
          (t.head.num_classes != 0 && t.head.num_classes != have.num_classes)) {
        heads::HeadSpec want = t.head;
        if (want.num_classes == 0) want.num_classes = have.num_classes;
        throw ConfigError("head '" + t.name + "': checkpoint has " + head_shape(have) +
                          ", config expects " + head_shape(want));
      }
      jobs.push_back({h, flags.manifest.empty() ? t.manifest : flags.manifest,
                      flags.manifest.empty() ? t.split : std::string()});
    }
  } else {
    for (std::size_t h = 0; h < model.num_heads(); ++h) {
      if (heads::is_classification(model.head(h).kind())) jobs.push_back({h, flags.manifest, ""});
    }
  }
  if (jobs.empty()) throw ConfigError("no classification head to evaluate");

  std::vector<metrics::EvalResult> results;
  for (const Job& job : jobs) {
    const auto& labels = model.spec().heads[job.head].labels;
    const train::Dataset ds =
        train::load_dataset(job.manifest, data.sample_rate, labels, job.split, true);
    if (ds.size() == 0) throw DataError("'" + job.manifest + "' has no rows to evaluate");
    results.push_back(train::evaluate(model, job.head, ds, data, clip_seconds, seed,
                                      std::max<std::size_t>(1, batch_size)));
  }
  out << metrics::format_eval_table(results);
  if (!flags.out.empty()) {
    fs::path path(flags.out);
    if (fs::is_directory(path)) path /= "eval.csv";
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream csv(path);
    metrics::write_eval_csv(csv, results);
    if (!csv) throw std::runtime_error("I/O error writing '" + path.string() + "'");
    spdlog::info("wrote {}", path.string());
  }
  return kExitOk;
}

int synth_command(const Flags& flags, const SynthFlags& sf, std::ostream& out) {
  if (flags.out.empty()) throw ConfigError("synth needs --out");
  audio::SynthConfig cfg;
  cfg.classes = sf.classes;
  cfg.clips_per_class = sf.clips_per_class;
  cfg.unlabeled_clips = sf.unlabeled;
  cfg.seconds = sf.seconds;
  cfg.snr_db = sf.snr_db;
  cfg.seed = flags.seed.value_or(0);
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const audio::SynthCorpus corpus = audio::synthesize(cfg);
  audio::write_corpus(corpus, flags.out);
  out << "wrote " << corpus.labeled.size() << " labeled clips ("
      << (fs::path(flags.out) / "labeled.csv").string() << ") and " << corpus.unlabeled.size()
      << " unlabeled clips (" << (fs::path(flags.out) / "unlabeled.csv").string() << ")\n";
  return kExitOk;
}

int verify_command(const Flags& flags, const VerifyFlags& vf, std::ostream& out) {
  VerifyOptions opt;
  opt.seed = flags.seed.value_or(0);
  opt.corrupt_op = vf.corrupt_op;
  const std::vector<CheckResult> results = run_verify(vf.suite, opt);
  std::size_t passed = 0;
  for (const auto& r : results) {
    out << format_check(r) << "\n";
    if (r.passed) {
      ++passed;
    } else {
      spdlog::error("{}/{} failed: {}", r.suite, r.name, r.detail);
    }
  }
  out << "verify " << vf.suite << ": " << passed << "/" << results.size() << " checks passed\n";
  out.flush();
  return passed == results.size() ? kExitOk : kExitFailure;
}

}  // namespace

void configure_logging() {
  auto logger = spdlog::get("wavetrunk");
  if (!logger) {
    logger = spdlog::stderr_logger_mt("wavetrunk");
    logger->set_pattern("[%H:%M:%S.%e] [%l] %v");
    spdlog::set_default_logger(logger);
  }
  spdlog::level::level_enum level = spdlog::level::info;
  if (const char* env = std::getenv("WAVETRUNK_LOG"); env != nullptr && *env != '\0') {
    std::string name(env);
    std::transform(name.begin(), name.end(), name.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (name == "warning") name = "warn";
    level = spdlog::level::from_str(name);
    if (level == spdlog::level::off && name != "off") {
      level = spdlog::level::info;
      spdlog::set_level(level);
      spdlog::warn("ignoring unknown WAVETRUNK_LOG level '{}'", env);
    }
  }
  spdlog::set_level(level);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  configure_logging();
  CLI::App app{"WaveTrunk: multitask audio representation learning on raw waveforms",
               "wavetrunk"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "wavetrunk 0.1.0");

  Flags flags;
  SynthFlags synth_flags;
  VerifyFlags verify_flags;

  auto add_seed = [&](CLI::App* cmd, const char* what) { cmd->add_option("--seed", flags.seed, what); };

  CLI::App* train = app.add_subcommand("train", "Train every configured task jointly");
  train->add_option("--config", flags.config, "Run configuration (JSON)")->required();
  train->add_option("--resume", flags.resume, "Continue from this checkpoint");
  add_seed(train, "Override train.seed");
  train->add_option("--workers", flags.workers, "Override train.workers");
  train->add_option("--out", flags.out, "Checkpoint and log directory (overrides io)");

  CLI::App* pretrain =
      app.add_subcommand("pretrain", "Train a trunk on self-supervised tasks only");
  pretrain->add_option("--config", flags.config, "Run configuration (JSON)")->required();
  pretrain->add_option("--resume", flags.resume, "Continue from this checkpoint");
  add_seed(pretrain, "Override train.seed");
  pretrain->add_option("--workers", flags.workers, "Override train.workers");
  pretrain->add_option("--out", flags.out, "Checkpoint and log directory (overrides io)");

  CLI::App* finetune =
      app.add_subcommand("finetune", "Train supervised heads on a pretrained trunk");
  finetune->add_option("--config", flags.config, "Run configuration (JSON)")->required();
  finetune->add_option("--checkpoint", flags.checkpoint, "Pretrained checkpoint")->required();
  finetune->add_option("--resume", flags.resume, "Continue an interrupted fine-tuning run");
  add_seed(finetune, "Override train.seed");
  finetune->add_option("--workers", flags.workers, "Override train.workers");
  finetune->add_option("--out", flags.out, "Checkpoint and log directory (overrides io)");

  CLI::App* evaluate =
      app.add_subcommand("evaluate", "Report MAP@3, top-1 and top-5 of classification heads");
  evaluate->add_option("--checkpoint", flags.checkpoint, "Model checkpoint")->required();
  evaluate->add_option("--config", flags.config, "Run configuration naming tasks and data");
  evaluate->add_option("--manifest", flags.manifest, "Labeled manifest to evaluate on");
  add_seed(evaluate, "Seed for evaluation crops");
  evaluate->add_option("--out", flags.out, "Write results as CSV to this file or directory");

  CLI::App* synth = app.add_subcommand("synth", "Generate a synthetic labeled and unlabeled corpus");
  synth->add_option("--out", flags.out, "Output directory")->required();
  add_seed(synth, "Corpus seed");
  synth->add_option("--classes", synth_flags.classes, "Number of classes")->capture_default_str();
  synth->add_option("--clips-per-class", synth_flags.clips_per_class, "Labeled clips per class")
      ->capture_default_str();
  synth->add_option("--unlabeled", synth_flags.unlabeled, "Unlabeled clips")->capture_default_str();
  synth->add_option("--seconds", synth_flags.seconds, "Clip duration")->capture_default_str();
  synth->add_option("--snr", synth_flags.snr_db, "Background noise SNR in dB")
      ->capture_default_str();

  CLI::App* verify = app.add_subcommand("verify", "Run gradient, DSP and property checks");
  verify->add_option("suite", verify_flags.suite, "gradcheck, dsp, props or all")
      ->check(CLI::IsMember({"gradcheck", "dsp", "props", "all"}))
      ->capture_default_str();
  add_seed(verify, "Seed for random test cases");
  verify->add_option("--corrupt-op", verify_flags.corrupt_op)->group("");

  std::vector<std::string> argv_storage;
  argv_storage.reserve(args.size() + 1);
  argv_storage.emplace_back("wavetrunk");
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_storage) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (train->parsed()) return train_command(flags, out, false);
    if (pretrain->parsed()) return train_command(flags, out, true);
    if (finetune->parsed()) return finetune_command(flags, out);
    if (evaluate->parsed()) return evaluate_command(flags, out);
    if (synth->parsed()) return synth_command(flags, synth_flags, out);
    if (verify->parsed()) return verify_command(flags, verify_flags, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DataError& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitConfig;
}

}  // namespace wavetrunk::cli
