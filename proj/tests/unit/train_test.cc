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


#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "test_util.h"
#include "wavetrunk/audio/synth.h"
#include "wavetrunk/errors.h"
#include "wavetrunk/train/checkpoint.h"
#include "wavetrunk/train/data.h"
#include "wavetrunk/train/model.h"
#include "wavetrunk/train/trainer.h"

namespace wavetrunk::train {
namespace {

using heads::HeadKind;
using heads::HeadSpec;
using wavetrunk::testing::ScratchDir;

Checkpoint small_checkpoint() {
  Checkpoint c;
  c.epoch = 7;
  c.config_json = R"({"a":1})";
  c.add_f32("w", {2, 2}, {1.0f, -2.0f, 0.5f, 3.25f});
  c.add_i64("step", 42);
  return c;
}

TEST(CheckpointTest, ByteLayout) {
  const auto bytes = serialize(small_checkpoint());
  ASSERT_GE(bytes.size(), 24u);
  EXPECT_EQ(std::memcmp(bytes.data(), "WTRK", 4), 0);
  EXPECT_EQ(bytes[4], 1);  // version, little endian
  EXPECT_EQ(bytes[8], 7);  // epoch
  EXPECT_EQ(bytes[16], 7);  // config length
  // 4+4+8+4+7+4, then w: 2+1+1+1+16+16, then step: 2+4+1+1+8+8, then crc 4.
  EXPECT_EQ(bytes.size(), 31u + 37u + 24u + 4u);
}

TEST(CheckpointTest, RoundTrip) {
  const Checkpoint c = small_checkpoint();
  const Checkpoint d = deserialize(serialize(c), "mem");
  EXPECT_EQ(d.version, kCheckpointVersion);
  EXPECT_EQ(d.epoch, 7u);
  EXPECT_EQ(d.config_json, c.config_json);
  ASSERT_EQ(d.tensors.size(), 2u);
  const CheckpointTensor* w = d.find("w");
  ASSERT_NE(w, nullptr);
  EXPECT_EQ(w->shape, (ndgrad::Shape{2, 2}));
  EXPECT_EQ(w->f32, c.tensors[0].f32);
  EXPECT_EQ(d.find("step")->i64, std::vector<std::int64_t>{42});
  EXPECT_EQ(d.find("missing"), nullptr);
  EXPECT_EQ(serialize(d), serialize(c));
}

TEST(CheckpointTest, RejectsDamage) {
  const auto good = serialize(small_checkpoint());
  auto bad_magic = good;
  bad_magic[0] = 'X';
  EXPECT_THROW(deserialize(bad_magic, "m"), CheckpointError);
  auto flipped = good;
  flipped[40] ^= 0x10;
  EXPECT_THROW(deserialize(flipped, "m"), CheckpointError);
  for (std::size_t n : {std::size_t{0}, std::size_t{6}, good.size() / 2, good.size() - 1}) {
    std::vector<unsigned char> cut(good.begin(), good.begin() + static_cast<long>(n));
    EXPECT_THROW(deserialize(cut, "m"), CheckpointError) << n;
  }
  EXPECT_THROW(read_checkpoint("/nonexistent/x.wtrk"), CheckpointError);
  try {
    deserialize(flipped, "run/x.wtrk");
    FAIL();
  } catch (const CheckpointError& e) {
    EXPECT_NE(std::string(e.what()).find("run/x.wtrk"), std::string::npos);
  }
}

TEST(CheckpointTest, FileRoundTrip) {
  ScratchDir dir("ckpt");
  write_checkpoint(dir.str("a.wtrk"), small_checkpoint());
  const Checkpoint d = read_checkpoint(dir.str("a.wtrk"));
  EXPECT_EQ(serialize(d), serialize(small_checkpoint()));
}

ModelSpec sample_spec() {
  ModelSpec spec;
  spec.trunk = TrunkConfig{1, 3, 8};
  TaskHead tag{"tag", HeadSpec::defaults(HeadKind::kTagging), {"a", "b", "c"}};
  tag.spec.num_classes = 3;
  tag.spec.hidden_units = 16;
  TaskHead den{"den", HeadSpec::defaults(HeadKind::kDenoise), {}};
  den.spec.hidden_units = 8;
  den.spec.filter_width = 3;
  den.spec.delay = 2;
  spec.heads = {tag, den};
  return spec;
}

TEST(ModelTest, SpecJsonRoundTrip) {
  const ModelSpec spec = sample_spec();
  const ModelSpec back = ModelSpec::from_json(spec.to_json());
  EXPECT_EQ(back.to_json(), spec.to_json());
  ASSERT_EQ(back.heads.size(), 2u);
  EXPECT_EQ(back.heads[0].labels, spec.heads[0].labels);
  EXPECT_EQ(back.heads[1].spec.delay, std::optional<std::size_t>(2));
  EXPECT_THROW(ModelSpec::from_json("{"), ConfigError);
  EXPECT_THROW(ModelSpec::from_json("{}"), ConfigError);
}

TEST(ModelTest, SeededInitialization) {
  Model a(sample_spec(), 5), b(sample_spec(), 5), c(sample_spec(), 6);
  const auto ta = a.named_tensors(), tb = b.named_tensors(), tc = c.named_tensors();
  ASSERT_EQ(ta.size(), tb.size());
  bool differs = false;
  for (std::size_t i = 0; i < ta.size(); ++i) {
    EXPECT_EQ(ta[i].name, tb[i].name);
    ASSERT_EQ(ta[i].value.size(), tb[i].value.size());
    EXPECT_EQ(std::memcmp(ta[i].value.data().data(), tb[i].value.data().data(),
                          ta[i].value.size() * sizeof(float)),
              0);
    for (std::size_t k = 0; k < ta[i].value.size(); ++k) {
      differs |= ta[i].value.data()[k] != tc[i].value.data()[k];
    }
  }
  EXPECT_TRUE(differs);
  EXPECT_EQ(a.head_index("den"), 1u);
  EXPECT_THROW(a.head_index("nope"), ConfigError);
}

class TrainerTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new ScratchDir("trainer");
    audio::SynthConfig s;
    s.classes = 3;
    s.clips_per_class = 4;
    s.unlabeled_clips = 6;
    s.seconds = 0.25;
    s.seed = 3;
    audio::write_corpus(audio::synthesize(s), dir_->str());
  }
  static void TearDownTestSuite() { delete dir_; }

  std::vector<Task> tasks() const {
    const ModelSpec spec = sample_spec();
    Task tag{"tag", spec.heads[0].spec, 1.0,
             load_dataset(dir_->str("labeled.csv"), 16000, {}, "train", true)};
    Task den{"den", spec.heads[1].spec, 0.5,
             load_dataset(dir_->str("unlabeled.csv"), 16000)};
    return {tag, den};
  }

  TrainConfig config(const std::string& out) const {
    TrainConfig c;
    c.batch_size = 4;
    c.epochs = 3;
    c.seed = 11;
    c.clip_seconds = 0.125;
    c.checkpoint_dir = out;
    c.log_path = out.empty() ? "" : out + "/log.csv";
    return c;
  }

  static ScratchDir* dir_;
};
ScratchDir* TrainerTest::dir_ = nullptr;

std::vector<unsigned char> file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

TEST_F(TrainerTest, DatasetAndExamples) {
  const auto t = tasks();
  EXPECT_EQ(t[0].data.size(), 12u);
  EXPECT_EQ(t[0].data.vocabulary.size(), 3u);
  EXPECT_EQ(t[1].data.size(), 6u);
  EXPECT_THROW(load_dataset(dir_->str("unlabeled.csv"), 16000, {}, "train", true), DataError);
  EXPECT_THROW(load_dataset(dir_->str("labeled.csv"), 16000, {}, "test"), DataError);

  DataConfig data;
  Rng rng(1);
  const Example up = prepare_example(HeadKind::kUpsample, t[1].data.clips[0], data, 0.125,
                                     false, {}, rng);
  EXPECT_EQ(up.input.size(), 2000u);
  EXPECT_EQ(up.target.size(), 2000u);
  const Example cls = prepare_example(HeadKind::kTagging, t[0].data.clips[5], data, 0.125,
                                      false, {}, rng);
  EXPECT_EQ(cls.label, *t[0].data.clips[5].label);
  EXPECT_TRUE(cls.target.empty());
  EXPECT_THROW(prepare_example(HeadKind::kTagging, t[1].data.clips[0], data, 0.125, false,
                               {}, rng),
               DataError);
}

TEST_F(TrainerTest, TotalIsWeightedSum) {
  Model model(sample_spec(), 1);
  Trainer trainer(model, tasks(), config(""), DataConfig{});
  EXPECT_EQ(trainer.steps_per_epoch(), 3u);
  const StepResult r = trainer.step(0, 0);
  ASSERT_EQ(r.losses.size(), 2u);
  EXPECT_NEAR(r.total, r.losses[0] + 0.5 * r.losses[1], 1e-6);
  EXPECT_LE(trainer.max_total_error(), 1e-6);
  EXPECT_GT(r.losses[0], 0.0);
}

TEST_F(TrainerTest, BatchesAreDeterministic) {
  Model m1(sample_spec(), 1), m2(sample_spec(), 1);
  Trainer a(m1, tasks(), config(""), DataConfig{});
  Trainer b(m2, tasks(), config(""), DataConfig{});
  const auto ea = a.batch_examples(1, 2, 1), eb = b.batch_examples(1, 2, 1);
  ASSERT_EQ(ea.size(), eb.size());
  for (std::size_t i = 0; i < ea.size(); ++i) {
    EXPECT_EQ(ea[i].input, eb[i].input);
    EXPECT_EQ(ea[i].target, eb[i].target);
  }
  EXPECT_NE(a.batch_examples(1, 0, 0)[0].input, ea[0].input);
}

TEST_F(TrainerTest, ResumeMatchesUninterruptedRun) {
  ScratchDir out("resume");
  {
    Model m(sample_spec(), 1);
    Trainer t(m, tasks(), config(out.str("full")), DataConfig{});
    t.fit();
  }
  {
    Model m(sample_spec(), 1);
    TrainConfig c = config(out.str("part"));
    c.epochs = 1;
    Trainer t(m, tasks(), c, DataConfig{});
    t.fit();
  }
  {
    Model m(sample_spec(), 1);
    Trainer t(m, tasks(), config(out.str("part")), DataConfig{});
    t.resume(read_checkpoint(out.str("part/epoch_0001.wtrk")));
    EXPECT_EQ(t.next_epoch(), 1u);
    t.fit();
  }
  EXPECT_EQ(file_bytes(out.str("full/last.wtrk")), file_bytes(out.str("part/last.wtrk")));
  EXPECT_EQ(file_bytes(out.str("full/log.csv")), file_bytes(out.str("part/log.csv")));
  EXPECT_TRUE(std::filesystem::exists(out.str("full/epoch_0003.wtrk")));

  std::ifstream log(out.str("full/log.csv"));
  std::string line;
  std::getline(log, line);
  EXPECT_EQ(line + "\n", format_log_header());
  int rows = 0;
  while (std::getline(log, line)) ++rows;
  EXPECT_EQ(rows, 6);
}

TEST_F(TrainerTest, ResumeRejectsMismatchedModel) {
  Model m(sample_spec(), 1);
  Trainer t(m, tasks(), config(""), DataConfig{});
  Checkpoint ck = t.checkpoint();
  ModelSpec other = sample_spec();
  other.trunk.channels = 4;
  Model m2(other, 1);
  Trainer t2(m2, tasks(), config(""), DataConfig{});
  EXPECT_ANY_THROW(t2.resume(ck));
  Checkpoint broken = ck;
  broken.tensors.front().f32.pop_back();
  broken.tensors.front().shape = {broken.tensors.front().f32.size()};
  EXPECT_ANY_THROW(t.resume(broken));
}

TEST_F(TrainerTest, FrozenTrunkStaysFixed) {
  Model m(sample_spec(), 1);
  TrainConfig c = config("");
  c.freeze_trunk = true;
  c.epochs = 1;
  std::vector<std::vector<float>> before;
  for (const auto& p : m.trunk_parameters()) {
    before.emplace_back(p.value.data().begin(), p.value.data().end());
  }
  const std::vector<float> head0(m.head_parameters(0)[0].value.data().begin(),
                                 m.head_parameters(0)[0].value.data().end());
  Trainer t(m, tasks(), c, DataConfig{});
  t.fit();
  const auto after = m.trunk_parameters();
  for (std::size_t i = 0; i < after.size(); ++i) {
    EXPECT_EQ(std::memcmp(before[i].data(), after[i].value.data().data(),
                          before[i].size() * sizeof(float)),
              0)
        << after[i].name;
  }
  EXPECT_NE(std::vector<float>(m.head_parameters(0)[0].value.data().begin(),
                               m.head_parameters(0)[0].value.data().end()),
            head0);
}

TEST_F(TrainerTest, CheckpointRestoresModel) {
  Model m(sample_spec(), 1);
  TrainConfig c = config("");
  c.epochs = 1;
  Trainer t(m, tasks(), c, DataConfig{});
  t.fit();
  const Checkpoint ck = t.checkpoint();
  Model back = model_from_checkpoint(deserialize(serialize(ck), "mem"));
  EXPECT_EQ(back.spec().to_json(), m.spec().to_json());
  const auto a = m.named_tensors(), b = back.named_tensors();
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(std::memcmp(a[i].value.data().data(), b[i].value.data().data(),
                          a[i].value.size() * sizeof(float)),
              0);
  }
  const auto data = tasks()[0].data;
  const auto r1 = evaluate(m, 0, data, DataConfig{}, 0.125, 0, 4);
  const auto r2 = evaluate(back, 0, data, DataConfig{}, 0.125, 0, 4);
  EXPECT_EQ(r1.top1, r2.top1);
  EXPECT_EQ(r1.map_at_3, r2.map_at_3);
  EXPECT_EQ(r1.num_examples, 12u);
}

TEST(TrainConfigTest, Validation) {
  TrainConfig c;
  EXPECT_NO_THROW(c.validate());
  c.batch_size = 0;
  EXPECT_ANY_THROW(c.validate());
  DataConfig d;
  d.pre_emphasis = 1.5;
  EXPECT_ANY_THROW(d.validate());
}

}  // namespace
}  // namespace wavetrunk::train
