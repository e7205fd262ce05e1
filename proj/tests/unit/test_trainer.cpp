#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "serlab/common/error.hpp"
#include "serlab/common/rng.hpp"
#include "serlab/dataio/checkpoint.hpp"
#include "serlab/trainer/adam.hpp"
#include "serlab/trainer/predict.hpp"
#include "serlab/trainer/trainer.hpp"

using namespace serlab;
using namespace serlab::trainer;
using model::FusionKind;
using model::Modality;
using model::Task;
using numerics::ParamStore;
using numerics::Tensor;
using serlab::testing::small_config;
using serlab::testing::small_stage1;
using serlab::testing::small_stage2;

namespace {

const dataio::Dataset& small_data() {
  static const dataio::Dataset ds = dataio::gen_synthetic(small_config(3));
  return ds;
}

struct Sources {
  dataio::Checkpoint speech, text;
};

const Sources& sources(Task task) {
  static std::map<Task, Sources> cache;
  auto it = cache.find(task);
  if (it == cache.end()) {
    Sources s{train_stage1(small_stage1(Modality::kSpeech, task, 1), small_data()).checkpoint,
              train_stage1(small_stage1(Modality::kText, task, 2), small_data()).checkpoint};
    it = cache.emplace(task, std::move(s)).first;
  }
  return it->second;
}

}  // namespace

TEST(Adam, ZeroGradientIsNoOp) {
  ParamStore p;
  p.add("w", Tensor::vector({1.5, -2}));
  p.zero_grad();
  AdamState st;
  std::vector<std::string> names{"w"};
  adam_step(p, names, st, 0.1);
  EXPECT_EQ(p.value("w").values(), (std::vector<double>{1.5, -2}));
  for (double m : st.m.at("w").data()) EXPECT_EQ(m, 0.0);
  for (double v : st.v.at("w").data()) EXPECT_EQ(v, 0.0);
}

TEST(Adam, FirstStepIsMinusLr) {
  for (double lr : {1e-5, 1e-3, 0.1}) {
    ParamStore p;
    p.add("w", Tensor::scalar(0.0));
    p.set_grad("w", Tensor::scalar(1.0));
    AdamState st;
    std::vector<std::string> names{"w"};
    adam_step(p, names, st, lr);
    EXPECT_NEAR(p.value("w")[0], -lr * 1.0 / (1.0 + 1e-8), 1e-15);
    for (int i = 0; i < 5; ++i) adam_step(p, names, st, lr);
    EXPECT_NEAR(p.value("w")[0], -6 * lr, 1e-7 * lr + 1e-15);
  }
}

TEST(Adam, IdenticalTrajectoriesAndShapeCheck) {
  ParamStore a, b;
  a.add("w", Tensor::vector({1, 2, 3}));
  b.add("w", Tensor::vector({1, 2, 3}));
  AdamState sa, sb;
  std::vector<std::string> names{"w"};
  Rng rng(4);
  for (int i = 0; i < 20; ++i) {
    Tensor g = Tensor::vector({rng.normal(), rng.normal(), rng.normal()});
    a.set_grad("w", g);
    b.set_grad("w", g);
    adam_step(a, names, sa, 0.01);
    adam_step(b, names, sb, 0.01);
  }
  EXPECT_TRUE(a.value("w").identical(b.value("w")));
  sa.m["w"] = Tensor::vector({0});
  EXPECT_THROW(adam_step(a, names, sa, 0.01), ValidationError);
}

TEST(Config, DefaultsAndValidation) {
  TrainConfig s1 = TrainConfig::defaults(1), s2 = TrainConfig::defaults(2);
  EXPECT_EQ(s1.batch_size, 32u);
  EXPECT_EQ(s1.learning_rate, 1e-5);
  EXPECT_EQ(s1.epochs, 20u);
  EXPECT_EQ(s2.learning_rate, 5e-6);
  EXPECT_EQ(s2.epochs, 5u);
  EXPECT_EQ(s1.effective_loss(), LossKind::kFocal);
  TrainConfig bad = s1;
  bad.task = Task::kAttributes;
  bad.loss = LossKind::kWeightedCrossEntropy;
  EXPECT_THROW(bad.validate(), ValidationError);
  bad = s1;
  bad.loss = LossKind::kCcc;
  EXPECT_THROW(bad.validate(), ValidationError);
  bad = s1;
  bad.sampler = SamplerKind::kBalanced;
  bad.batch_size = 20;
  EXPECT_THROW(bad.validate(), ValidationError);
  EXPECT_EQ(parse_loss("ccc_loss"), LossKind::kCcc);
}

TEST(Stage1, ZeroLearningRateKeepsInit) {
  TrainConfig cfg = small_stage1(Modality::kSpeech, Task::kCategorical, 5);
  TrainConfig init = cfg;
  init.epochs = 0;
  cfg.learning_rate = 0.0;
  cfg.epochs = 2;
  auto a = train_stage1(init, small_data()), b = train_stage1(cfg, small_data());
  ASSERT_EQ(a.checkpoint.params.names(), b.checkpoint.params.names());
  for (const auto& n : a.checkpoint.params.names()) {
    EXPECT_TRUE(a.checkpoint.params.value(n).identical(b.checkpoint.params.value(n))) << n;
  }
  EXPECT_EQ(b.log.size(), 3u);
}

TEST(Stage1, Deterministic) {
  for (Task task : {Task::kCategorical, Task::kAttributes}) {
    TrainConfig cfg = small_stage1(Modality::kText, task, 9);
    auto a = train_stage1(cfg, small_data()), b = train_stage1(cfg, small_data());
    EXPECT_EQ(dataio::encode_checkpoint(a.checkpoint), dataio::encode_checkpoint(b.checkpoint));
    cfg.seed = 10;
    EXPECT_NE(checkpoint_id(train_stage1(cfg, small_data()).checkpoint), checkpoint_id(a.checkpoint));
  }
}

TEST(Stage1, LossAndSamplerVariantsRun) {
  for (LossKind loss : {LossKind::kCrossEntropy, LossKind::kWeightedCrossEntropy, LossKind::kFocal}) {
    TrainConfig cfg = small_stage1(Modality::kSpeech, Task::kCategorical, 3);
    cfg.loss = loss;
    cfg.sampler = SamplerKind::kBalanced;
    cfg.epochs = 1;
    auto r = train_stage1(cfg, small_data());
    EXPECT_GT(r.log.at(1).steps, 0u);
  }
  TrainConfig mse = small_stage1(Modality::kSpeech, Task::kAttributes, 3);
  mse.loss = LossKind::kMse;
  EXPECT_NO_THROW(train_stage1(mse, small_data()));
}

TEST(Stage1, LossNonIncreasingOnSeparableData) {
  dataio::SynthConfig sc = small_config(21, 40);
  sc.separation = 2.0;
  dataio::Dataset ds = dataio::gen_synthetic(sc);
  TrainConfig cfg = small_stage1(Modality::kSpeech, Task::kCategorical, 4);
  cfg.epochs = 8;
  auto r = train_stage1(cfg, ds);
  for (std::size_t e = 3; e < r.log.size(); ++e) {
    EXPECT_LE(r.log[e].train_loss, r.log[e - 1].train_loss) << "epoch " << e;
  }
}

TEST(Stage2, FreezeContract) {
  for (Task task : {Task::kCategorical, Task::kAttributes}) {
    const Sources& src = sources(task);
    for (FusionKind f : {FusionKind::kConcat, FusionKind::kCrossAttention}) {
      auto r = train_stage2(small_stage2(f, task, 6), src.speech, src.text, small_data());
      const auto& p = r.checkpoint.params;
      std::size_t frozen = 0;
      for (const auto& n : p.names()) {
        if (n.rfind("head.", 0) == 0 || n.rfind("xattn.", 0) == 0) continue;
        const auto& from = n.rfind("speech.", 0) == 0 ? src.speech.params : src.text.params;
        EXPECT_EQ(dataio::tensor_sha256(p.value(n)), dataio::tensor_sha256(from.value(n))) << n;
        ++frozen;
      }
      EXPECT_GT(frozen, 0u);
      EXPECT_EQ(r.checkpoint.metadata["frozen"].size(), frozen);
      EXPECT_EQ(r.checkpoint.metadata["sources"]["speech"], checkpoint_id(src.speech));
      EXPECT_EQ(r.checkpoint.metadata["sources"]["text"], checkpoint_id(src.text));
      EXPECT_EQ(p.contains("xattn.q.W"), f == FusionKind::kCrossAttention);
    }
  }
}

TEST(Stage2, SourceChecks) {
  const Sources& src = sources(Task::kCategorical);
  TrainConfig cfg = small_stage2(FusionKind::kConcat, Task::kCategorical, 1);
  auto s2 = train_stage2(cfg, src.speech, src.text, small_data()).checkpoint;
  EXPECT_THROW(train_stage2(cfg, s2, src.text, small_data()), ValidationError);
  EXPECT_THROW(train_stage2(cfg, src.text, src.text, small_data()), ValidationError);
  EXPECT_THROW(train_stage1(cfg, small_data()), ValidationError);
}

TEST(Stage2, ActivationIsTheOnlyDifference) {
  const Sources& src = sources(Task::kAttributes);
  TrainConfig mish = small_stage2(FusionKind::kConcat, Task::kAttributes, 8);
  mish.epochs = 0;
  TrainConfig relu = mish;
  relu.activation = model::Activation::kRelu;
  auto a = train_stage2(mish, src.speech, src.text, small_data()).checkpoint;
  auto b = train_stage2(relu, src.speech, src.text, small_data()).checkpoint;
  for (const auto& n : a.params.names()) EXPECT_TRUE(a.params.value(n).identical(b.params.value(n))) << n;
  auto pa = predict(a, small_data(), dataio::Split::kDev), pb = predict(b, small_data(), dataio::Split::kDev);
  EXPECT_NE(pa, pb);
  auto dev = small_data().split(dataio::Split::kDev);
  EXPECT_NO_THROW(score_predictions(pa, dev).csv_row());
  EXPECT_NO_THROW(score_predictions(pb, dev).csv_row());
}

TEST(Predict, ArgmaxAndClamp) {
  std::vector<double> logits{0.1, 2.0, 0.5, -1, 2.0, 0, 0, 0};
  EXPECT_EQ(argmax_emotion(logits), metrics::Emotion::kContempt);
  std::vector<double> out{0.5, 3.0, 8.0};
  EXPECT_EQ(attribute_output(out, true), (metrics::AttributeVector{1.0, 3.0, 7.0}));
  EXPECT_EQ(attribute_output(out, false), (metrics::AttributeVector{0.5, 3.0, 8.0}));
}

TEST(Predict, DeterministicAndChecked) {
  const Sources& src = sources(Task::kCategorical);
  auto a = predict(src.speech, small_data(), std::nullopt), b = predict(src.speech, small_data(), std::nullopt);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.items.size(), small_data().records.size());
  PredictOptions wrong;
  wrong.task = Task::kAttributes;
  EXPECT_THROW(predict(src.speech, small_data(), std::nullopt, wrong), ValidationError);
  auto s2 = train_stage2(small_stage2(FusionKind::kConcat, Task::kCategorical, 1), src.speech, src.text, small_data());
  dataio::UtteranceRecord bare = small_data().records[0];
  bare.text = Tensor();
  std::vector<const dataio::UtteranceRecord*> one{&bare};
  try {
    predict(s2.checkpoint, one);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("no text features"), std::string::npos) << e.what();
  }
}

TEST(Score, MissingPredictionsCounted) {
  auto dev = small_data().split(dataio::Split::kDev);
  dataio::PredictionSet perfect;
  for (const auto* r : dev) perfect.items.push_back({r->id, r->emotion, r->attributes});
  auto full = score_predictions(perfect, dev);
  EXPECT_EQ(full.csv_row(), "1.000,1.000,1.000,1.000,1.000,1.000,1.000");
  EXPECT_EQ(full.missing, 0u);
  perfect.items.pop_back();
  perfect.items[0].attributes.reset();
  auto partial = score_predictions(perfect, dev);
  EXPECT_EQ(partial.missing, 2u);
}
