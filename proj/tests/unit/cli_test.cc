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


#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli/commands.h"
#include "cli/run_config.h"
#include "gtest/gtest.h"
#include "test_util.h"
#include "wavetrunk/errors.h"
#include "wavetrunk/train/checkpoint.h"
#include "wavetrunk/train/trainer.h"

namespace wavetrunk::cli {
namespace {

namespace fs = std::filesystem;
using wavetrunk::testing::ScratchDir;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream(path, std::ios::trunc) << text;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string error_of(const std::string& text) {
  try {
    RunConfig::parse(text, "/base", "cfg.json");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

TEST(RunConfigTest, Defaults) {
  const RunConfig c =
      RunConfig::parse(R"({"tasks":[{"kind":"tagging","manifest":"m.csv"}]})", "/base", "c");
  EXPECT_EQ(c.trunk.num_blocks, 3u);
  EXPECT_EQ(c.trunk.layers_per_block, 6u);
  EXPECT_EQ(c.trunk.channels, 64u);
  EXPECT_FALSE(c.trunk_given);
  EXPECT_EQ(c.train.batch_size, 48u);
  EXPECT_EQ(c.train.epochs, 10u);
  EXPECT_DOUBLE_EQ(c.train.trunk_lr, 3e-4);
  EXPECT_DOUBLE_EQ(c.train.clip_seconds, 2.0);
  EXPECT_EQ(c.train.schedule.epochs_per_step, 5u);
  EXPECT_DOUBLE_EQ(c.train.schedule.multiplier, 0.95);
  EXPECT_FALSE(c.train.freeze_trunk);
  EXPECT_EQ(c.data.sample_rate, 16000);
  EXPECT_DOUBLE_EQ(c.data.pre_emphasis, 0.97);
  EXPECT_FALSE(c.data.augment.enabled);
  ASSERT_EQ(c.tasks.size(), 1u);
  EXPECT_EQ(c.tasks[0].name, "tagging");
  EXPECT_EQ(c.tasks[0].manifest, "/base/m.csv");
  EXPECT_EQ(c.tasks[0].head.hidden_units, 512u);
  EXPECT_DOUBLE_EQ(c.tasks[0].head.lr, 5.37e-5);
  EXPECT_EQ(c.log_path(), "/base/wavetrunk_run/train_log.csv");
}

TEST(RunConfigTest, HeadOptionsAndPaths) {
  const RunConfig c = RunConfig::parse(R"({
    "trunk": {"blocks": 1, "layers": 2, "channels": 4},
    "tasks": [{"kind": "denoise", "name": "dn", "manifest": "/abs/a.csv",
               "unlabeled_manifest": "u.csv", "weight": 0.5,
               "filter_width": 3, "delay": 1, "hidden_units": 8}],
    "io": {"checkpoint_dir": "out"}})",
                                       "/base", "c");
  EXPECT_TRUE(c.trunk_given);
  EXPECT_EQ(c.tasks[0].name, "dn");
  EXPECT_EQ(c.tasks[0].data_manifest(), "/base/u.csv");
  EXPECT_EQ(c.tasks[0].manifest, "/abs/a.csv");
  EXPECT_EQ(c.tasks[0].head.delay, std::optional<std::size_t>(1));
  EXPECT_EQ(c.train_config().checkpoint_dir, "/base/out");
}

TEST(RunConfigTest, RejectsBadDocuments) {
  EXPECT_NE(error_of(R"({"tasks":[{"kind":"tagging","manifest":"m"}],"train":{"batchsize":4}})")
                .find("train.batchsize"),
            std::string::npos);
  EXPECT_NE(error_of(R"({"tasks":[{"kind":"tagging","manifest":"m","delay":3}]})")
                .find("does not apply to tagging"),
            std::string::npos);
  EXPECT_NE(error_of(R"({"tasks":[{"kind":"guess","manifest":"m"}]})"), "");
  EXPECT_NE(error_of(R"({"tasks":[{"kind":"tagging"}]})"), "");
  EXPECT_NE(error_of("[1,"), "");
  EXPECT_NE(error_of(R"({"tasks":[{"kind":"tagging","manifest":"m"}],"train":{"epochs":-1}})"),
            "");
  EXPECT_NE(error_of(R"({"tasks":[{"kind":"tagging","manifest":"m",
                                   "unlabeled_manifest":"u"}]})"),
            "");
  EXPECT_EQ(error_of(R"({"tasks":[{"kind":"tagging","manifest":"m"}]})"), "");
  try {
    RunConfig::load("/nonexistent/run.json");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("/nonexistent/run.json"), std::string::npos);
  }
}

class CliTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new ScratchDir("cli");
    const Outcome s = invoke({"synth", "--out", dir_->str("corpus"), "--seed", "4",
                              "--classes", "4", "--clips-per-class", "8", "--unlabeled",
                              "8", "--seconds", "0.25"});
    ASSERT_EQ(s.code, 0) << s.err;
    write_text(dir_->str("run.json"), R"({
      "trunk": {"blocks": 1, "layers": 3, "channels": 8},
      "tasks": [
        {"kind": "tagging", "name": "tag", "manifest": "corpus/labeled.csv",
         "hidden_units": 16},
        {"kind": "denoise", "manifest": "corpus/labeled.csv",
         "unlabeled_manifest": "corpus/unlabeled.csv", "hidden_units": 8,
         "filter_width": 3}],
      "train": {"batch_size": 8, "epochs": 2, "seed": 2, "clip_seconds": 0.125}
    })");
  }
  static void TearDownTestSuite() { delete dir_; }
  static ScratchDir* dir_;
};
ScratchDir* CliTest::dir_ = nullptr;

TEST_F(CliTest, SynthWritesCorpus) {
  std::size_t wavs = 0;
  for (const auto& e : fs::directory_iterator(dir_->str("corpus/labeled"))) {
    wavs += e.path().extension() == ".wav";
  }
  EXPECT_EQ(wavs, 32u);
  const std::string manifest = read_text(dir_->str("corpus/labeled.csv"));
  EXPECT_EQ(std::count(manifest.begin(), manifest.end(), '\n'), 33);

  ASSERT_EQ(invoke({"synth", "--out", dir_->str("again"), "--seed", "4", "--classes", "4",
                    "--clips-per-class", "8", "--unlabeled", "8", "--seconds", "0.25"})
                .code,
            0);
  EXPECT_EQ(read_text(dir_->str("again/labeled.csv")), manifest);
  for (const auto& e : fs::directory_iterator(dir_->str("corpus/labeled"))) {
    EXPECT_EQ(read_text(e.path().string()),
              read_text(dir_->str("again/labeled/" + e.path().filename().string())));
  }
}

TEST_F(CliTest, ExitCodes) {
  EXPECT_EQ(invoke({}).code, kExitConfig);
  EXPECT_EQ(invoke({"dance"}).code, kExitConfig);
  EXPECT_EQ(invoke({"train"}).code, kExitConfig);
  const Outcome missing = invoke({"train", "--config", dir_->str("nope.json")});
  EXPECT_EQ(missing.code, kExitConfig);
  EXPECT_NE(missing.err.find("nope.json"), std::string::npos);
  EXPECT_EQ(invoke({"--help"}).code, kExitOk);

  write_text(dir_->str("bad_data.json"),
             R"({"trunk":{"blocks":1,"layers":2,"channels":4},
                 "tasks":[{"kind":"tagging","manifest":"absent.csv"}]})");
  EXPECT_EQ(invoke({"train", "--config", dir_->str("bad_data.json"), "--out",
                    dir_->str("bad_out")})
                .code,
            kExitData);

  write_text(dir_->str("bad.wtrk"), "not a checkpoint");
  EXPECT_EQ(invoke({"evaluate", "--checkpoint", dir_->str("bad.wtrk"), "--manifest",
                    dir_->str("corpus/labeled.csv")})
                .code,
            kExitData);
  EXPECT_EQ(invoke({"pretrain", "--config", dir_->str("run.json")}).code, kExitConfig);
}

TEST_F(CliTest, VerifyReportsCorruptedOp) {
  const Outcome ok = invoke({"verify", "dsp"});
  EXPECT_EQ(ok.code, kExitOk) << ok.out;
  const Outcome bad = invoke({"verify", "gradcheck", "--corrupt-op", "tanh"});
  EXPECT_EQ(bad.code, kExitFailure);
  EXPECT_NE(bad.out.find("name=tanh result=fail"), std::string::npos) << bad.out;
  EXPECT_EQ(invoke({"verify", "gradcheck", "--corrupt-op", "nothing"}).code, kExitConfig);
}

TEST_F(CliTest, TrainResumeAndEvaluate) {
  const std::string cfg = dir_->str("run.json");
  const Outcome full = invoke({"train", "--config", cfg, "--out", dir_->str("full")});
  ASSERT_EQ(full.code, 0) << full.err;
  EXPECT_NE(full.out.find("trained through epoch 2 of 2"), std::string::npos) << full.out;

  write_text(dir_->str("one.json"),
             std::string(read_text(cfg)).replace(read_text(cfg).find("\"epochs\": 2"), 11,
                                                 "\"epochs\": 1"));
  ASSERT_EQ(invoke({"train", "--config", dir_->str("one.json"), "--out", dir_->str("part")})
                .code,
            0);
  const Outcome resumed = invoke({"train", "--config", cfg, "--out", dir_->str("part"),
                                  "--resume", dir_->str("part/epoch_0001.wtrk")});
  ASSERT_EQ(resumed.code, 0) << resumed.err;
  EXPECT_EQ(read_text(dir_->str("full/last.wtrk")), read_text(dir_->str("part/last.wtrk")));
  EXPECT_EQ(read_text(dir_->str("full/train_log.csv")),
            read_text(dir_->str("part/train_log.csv")));

  const Outcome ev = invoke({"evaluate", "--checkpoint", dir_->str("full/last.wtrk"),
                             "--config", cfg, "--out", dir_->str("eval.csv")});
  ASSERT_EQ(ev.code, 0) << ev.err;
  EXPECT_NE(ev.out.find("tag"), std::string::npos);

  const train::Checkpoint ck = train::read_checkpoint(dir_->str("full/last.wtrk"));
  train::Model model = train::model_from_checkpoint(ck);
  const RunConfig rc = RunConfig::load(cfg);
  const auto tasks = load_tasks(rc);
  const auto expected = train::evaluate(model, 0, tasks[0].data, rc.data,
                                        rc.train.clip_seconds, rc.train.seed,
                                        rc.train.batch_size);
  std::ostringstream csv;
  metrics::write_eval_csv(csv, {expected});
  EXPECT_EQ(read_text(dir_->str("eval.csv")), csv.str());

  write_text(dir_->str("mismatch.json"),
             R"({"trunk":{"blocks":1,"layers":3,"channels":8},
                 "tasks":[{"kind":"tagging","name":"tag","manifest":"corpus/labeled.csv",
                           "num_classes":5,"hidden_units":16}]})");
  const Outcome mm = invoke({"evaluate", "--checkpoint", dir_->str("full/last.wtrk"),
                             "--config", dir_->str("mismatch.json")});
  EXPECT_EQ(mm.code, kExitConfig);
  EXPECT_NE(mm.err.find("tag"), std::string::npos);
}

TEST_F(CliTest, FinetuneLoadsTrunk) {
  const std::string cfg = dir_->str("run.json");
  ASSERT_EQ(invoke({"train", "--config", cfg, "--out", dir_->str("ft_base")}).code, 0);
  write_text(dir_->str("ft.json"), R"({
      "tasks": [{"kind": "tagging", "name": "tag", "manifest": "corpus/labeled.csv",
                 "hidden_units": 16}],
      "train": {"batch_size": 8, "epochs": 1, "seed": 3, "clip_seconds": 0.125,
                "freeze_trunk": true}})");
  const Outcome ft = invoke({"finetune", "--config", dir_->str("ft.json"), "--checkpoint",
                             dir_->str("ft_base/last.wtrk"), "--out", dir_->str("ft_out")});
  ASSERT_EQ(ft.code, 0) << ft.err;
  const train::Checkpoint a = train::read_checkpoint(dir_->str("ft_base/last.wtrk"));
  const train::Checkpoint b = train::read_checkpoint(dir_->str("ft_out/last.wtrk"));
  std::size_t compared = 0;
  for (const auto& t : a.tensors) {
    if (t.name.rfind("trunk.", 0) != 0) continue;
    const auto* other = b.find(t.name);
    ASSERT_NE(other, nullptr) << t.name;
    EXPECT_EQ(other->f32, t.f32) << t.name;
    ++compared;
  }
  EXPECT_GT(compared, 0u);
  EXPECT_EQ(invoke({"finetune", "--config", dir_->str("ft.json")}).code, kExitConfig);
}

}  // namespace
}  // namespace wavetrunk::cli
