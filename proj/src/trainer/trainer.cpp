#include "serlab/trainer/trainer.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <unordered_map>

#include "serlab/common/error.hpp"
#include "serlab/common/hash.hpp"
#include "serlab/common/rng.hpp"
#include "serlab/losses/losses.hpp"
#include "serlab/model/encoders.hpp"
#include "serlab/model/fusion.hpp"
#include "serlab/sampling/batch_plan.hpp"
#include "serlab/trainer/adam.hpp"
#include "serlab/trainer/predict.hpp"

namespace serlab::trainer {

using dataio::Checkpoint;
using dataio::Dataset;
using numerics::ParamStore;
using numerics::Tape;
using numerics::Tensor;
using numerics::Var;

nlohmann::json EpochLog::to_json() const {
  return {{"epoch", epoch}, {"train_loss", train_loss}, {"steps", steps}, {"dev_score", dev_score}, {"dev", dev}};
}

std::string checkpoint_id(const Checkpoint& ckpt) { return sha256_hex(std::string_view(dataio::encode_checkpoint(ckpt))); }

double selection_score(const metrics::MetricsReport& report, Task task) {
  if (task == Task::kCategorical) {
    return report.classification ? report.classification->f1_macro : -std::numeric_limits<double>::infinity();
  }
  return report.attributes ? report.attributes->average : -std::numeric_limits<double>::infinity();
}

metrics::MetricsReport score_predictions(const dataio::PredictionSet& pred,
                                         std::span<const dataio::UtteranceRecord* const> truth) {
  std::unordered_map<std::string, const dataio::Prediction*> by_id;
  bool any_emotion = false;
  bool any_attributes = false;
  for (const auto& p : pred.items) {
    by_id.emplace(p.id, &p);
    any_emotion |= p.emotion.has_value();
    any_attributes |= p.attributes.has_value();
  }
  std::vector<metrics::Emotion> e_pred, e_truth;
  std::vector<metrics::AttributeVector> a_pred, a_truth;
  std::size_t missing = 0;
  for (const auto* r : truth) {
    auto it = by_id.find(r->id);
    const dataio::Prediction* p = it == by_id.end() ? nullptr : it->second;
    bool miss = false;
    if (any_emotion && r->emotion) {
      if (p && p->emotion) {
        e_pred.push_back(*p->emotion);
        e_truth.push_back(*r->emotion);
      } else {
        miss = true;
      }
    }
    if (any_attributes && r->attributes) {
      if (p && p->attributes) {
        a_pred.push_back(*p->attributes);
        a_truth.push_back(*r->attributes);
      } else {
        miss = true;
      }
    }
    missing += miss;
  }
  std::optional<metrics::ClassificationMetrics> cls;
  std::optional<metrics::AttributeMetrics> att;
  if (!e_pred.empty()) cls = metrics::classification_metrics(e_pred, e_truth);
  if (a_pred.size() >= 2) att = metrics::attribute_metrics(a_pred, a_truth);
  auto report = metrics::make_report(std::move(cls), std::move(att));
  report.missing = missing;
  return report;
}

namespace {

using Forward = std::function<Var(Tape&, const ParamStore&, std::size_t)>;

struct Split {
  std::vector<const dataio::UtteranceRecord*> rows;
  std::vector<std::size_t> classes;
};

Split labelled_split(const Dataset& ds, dataio::Split which, Task task) {
  Split s;
  s.rows = ds.split(which);
  if (s.rows.empty()) throw ValidationError("empty " + dataio::to_string(which) + " split");
  for (const auto* r : s.rows) {
    if (task == Task::kCategorical) {
      if (!r->emotion) throw ValidationError("record '" + r->id + "' has no emotion label");
      s.classes.push_back(metrics::index_of(*r->emotion));
    } else if (!r->attributes) {
      throw ValidationError("record '" + r->id + "' has no attribute labels");
    }
  }
  return s;
}

Var batch_loss(const TrainConfig& cfg, Var out, const Split& train, std::span<const std::size_t> batch,
               const losses::ClassWeights& weights) {
  const LossKind kind = cfg.effective_loss();
  if (cfg.task == Task::kCategorical) {
    std::vector<std::size_t> targets;
    for (auto i : batch) targets.push_back(train.classes[i]);
    switch (kind) {
      case LossKind::kCrossEntropy: return losses::cross_entropy(out, targets);
      case LossKind::kWeightedCrossEntropy: return losses::weighted_cross_entropy(out, targets, weights);
      default: return losses::focal_loss(out, targets, losses::FocalConfig{cfg.focal_gamma, {}});
    }
  }
  std::vector<double> truth;
  for (auto i : batch) {
    const auto& a = *train.rows[i]->attributes;
    truth.insert(truth.end(), {a.arousal, a.valence, a.dominance});
  }
  Var t = out.tape().constant(Tensor::matrix(batch.size(), 3, std::move(truth)));
  return kind == LossKind::kMse ? losses::mse_loss(out, t) : losses::ccc_loss(out, t);
}

metrics::MetricsReport evaluate(const TrainConfig& cfg, const ParamStore& params, const Split& dev,
                                const Forward& forward) {
  dataio::PredictionSet pred;
  for (std::size_t i = 0; i < dev.rows.size(); ++i) {
    Tape tape;
    const Tensor out = forward(tape, params, i).value();
    dataio::Prediction p{dev.rows[i]->id, {}, {}};
    if (cfg.task == Task::kCategorical) {
      p.emotion = argmax_emotion(out.data());
    } else {
      p.attributes = attribute_output(out.data(), false);
    }
    pred.items.push_back(std::move(p));
  }
  try {
    return score_predictions(pred, dev.rows);
  } catch (const ValidationError&) {
    return metrics::make_report(std::nullopt, std::nullopt);
  }
}

ParamStore snapshot(const ParamStore& params) {
  ParamStore out;
  for (const auto& [name, t] : params.values()) out.add(name, t);
  return out;
}

struct LoopResult {
  ParamStore best;
  std::vector<EpochLog> log;
  std::size_t best_epoch = 0;
  nlohmann::json best_dev;
};

LoopResult run_loop(const TrainConfig& cfg, ParamStore& params, const std::vector<std::string>& trainable,
                    const Split& train, const Split& dev, const Forward& train_forward, const Forward& dev_forward) {
  losses::ClassWeights weights;
  if (cfg.effective_loss() == LossKind::kWeightedCrossEntropy) {
    std::array<std::size_t, losses::kNumClasses> counts{};
    for (auto c : train.classes) ++counts[c];
    weights = losses::class_weights_from_counts(counts);
  }
  LoopResult result;
  AdamState adam;

  auto record_epoch = [&](std::size_t epoch, double loss, std::size_t steps) {
    auto report = evaluate(cfg, params, dev, dev_forward);
    EpochLog entry{epoch, loss, steps, selection_score(report, cfg.task), report.to_json()};
    if (epoch == 0 || entry.dev_score > result.log[result.best_epoch].dev_score) {
      result.best = snapshot(params);
      result.best_epoch = epoch;
      result.best_dev = entry.dev;
    }
    result.log.push_back(std::move(entry));
  };

  record_epoch(0, 0.0, 0);
  const bool skip_small = cfg.task == Task::kAttributes && cfg.effective_loss() == LossKind::kCcc;
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const std::uint64_t epoch_seed = derive_seed(cfg.seed, 1000 + epoch);
    const auto plan = cfg.sampler == SamplerKind::kBalanced
                          ? sampling::balanced_batches(train.classes, cfg.batch_size, epoch_seed)
                          : sampling::shuffled_batches(train.rows.size(), cfg.batch_size, epoch_seed);
    double total = 0.0;
    std::size_t steps = 0;
    for (const auto& batch : plan.batches) {
      if (skip_small && batch.size() < 2) continue;
      Tape tape;
      std::vector<Var> rows;
      rows.reserve(batch.size());
      for (auto i : batch) rows.push_back(train_forward(tape, params, i));
      Var out = numerics::stack_rows(rows);
      Var loss = batch_loss(cfg, out, train, batch, weights);
      numerics::backward(loss, params);
      adam_step(params, trainable, adam, cfg.learning_rate);
      total += loss.value()[0];
      ++steps;
    }
    record_epoch(epoch, steps == 0 ? 0.0 : total / static_cast<double>(steps), steps);
  }
  return result;
}

std::uint32_t dataset_dim(const Dataset& ds, Modality m) {
  const std::uint32_t d = m == Modality::kSpeech ? ds.speech_dim : ds.text_dim;
  if (d == 0) throw ValidationError("dataset has no " + model::to_string(m) + " features");
  return d;
}

nlohmann::json names_json(const std::vector<std::string>& names) { return names; }

}  // namespace

TrainResult train_stage1(const TrainConfig& cfg, const Dataset& ds) {
  cfg.validate();
  if (cfg.stage != 1) throw ValidationError("train_stage1 needs a stage-1 config");
  const Split train = labelled_split(ds, dataio::Split::kTrain, cfg.task);
  const Split dev = labelled_split(ds, dataio::Split::kDev, cfg.task);

  model::EncoderCfg enc{cfg.modality, dataset_dim(ds, cfg.modality), cfg.hidden, cfg.attention_dim, cfg.embed};
  ModelSpec spec;
  spec.stage = 1;
  spec.task = cfg.task;
  (cfg.modality == Modality::kSpeech ? spec.speech : spec.text) = enc;
  spec.head = {FusionKind::kConcat, cfg.activation, cfg.task, cfg.embed};

  ParamStore params;
  Rng rng(derive_seed(cfg.seed, 1));
  model::init_encoder(params, enc, rng);
  model::init_fusion_head(params, spec.head, rng);
  const auto trainable = params.names();

  auto forward_on = [&spec](const Split& s) {
    return [&spec, &s](Tape& tape, const ParamStore& p, std::size_t i) { return model_forward(tape, p, spec, *s.rows[i]); };
  };
  auto loop = run_loop(cfg, params, trainable, train, dev, forward_on(train), forward_on(dev));

  TrainResult result;
  result.checkpoint.params = std::move(loop.best);
  result.checkpoint.metadata = {{"stage", 1},
                                {"modality", model::to_string(cfg.modality)},
                                {"task", model::to_string(cfg.task)},
                                {"model", spec.to_json()},
                                {"config", cfg.to_json()},
                                {"seed", cfg.seed},
                                {"best_epoch", loop.best_epoch},
                                {"dev", loop.best_dev},
                                {"trainable", names_json(trainable)},
                                {"frozen", nlohmann::json::array()}};
  result.log = std::move(loop.log);
  result.best_epoch = loop.best_epoch;
  return result;
}

TrainResult train_stage2(const TrainConfig& cfg, const Checkpoint& speech, const Checkpoint& text, const Dataset& ds) {
  cfg.validate();
  if (cfg.stage != 2) throw ValidationError("train_stage2 needs a stage-2 config");
  if (speech.stage() != 1) throw ValidationError("speech source checkpoint is not a stage-1 checkpoint");
  if (text.stage() != 1) throw ValidationError("text source checkpoint is not a stage-1 checkpoint");
  const ModelSpec s_spec = checkpoint_spec(speech);
  const ModelSpec t_spec = checkpoint_spec(text);
  if (!s_spec.speech) throw ValidationError("speech source checkpoint has no speech encoder");
  if (!t_spec.text) throw ValidationError("text source checkpoint has no text encoder");

  ParamStore params;
  std::vector<std::string> frozen;
  for (const auto& [spec_enc, src] : {std::pair{*s_spec.speech, &speech}, std::pair{*t_spec.text, &text}}) {
    const auto names = model::encoder_param_names(spec_enc);
    src->require(names);
    for (const auto& n : names) {
      params.add(n, src->params.value(n));
      frozen.push_back(n);
    }
  }
  if (s_spec.speech->input_dim != dataset_dim(ds, Modality::kSpeech) ||
      t_spec.text->input_dim != dataset_dim(ds, Modality::kText)) {
    throw ValidationError("dataset feature widths do not match the source encoders");
  }

  ModelSpec spec;
  spec.stage = 2;
  spec.task = cfg.task;
  spec.speech = *s_spec.speech;
  spec.text = *t_spec.text;
  if (cfg.fusion == FusionKind::kConcat) {
    spec.head = {FusionKind::kConcat, cfg.activation, cfg.task, spec.speech->embed + spec.text->embed};
  } else {
    spec.xattn = model::CrossAttentionCfg{spec.speech->hidden, spec.text->hidden, cfg.xattn_dim};
    spec.head = {FusionKind::kCrossAttention, cfg.activation, cfg.task, cfg.xattn_dim};
  }

  Rng rng(derive_seed(cfg.seed, 2));
  if (spec.xattn) model::init_cross_attention(params, *spec.xattn, rng);
  model::init_fusion_head(params, spec.head, rng);
  std::vector<std::string> trainable;
  for (const auto& n : params.names()) {
    if (n.rfind("head.", 0) == 0 || n.rfind("xattn.", 0) == 0) trainable.push_back(n);
  }

  std::map<std::string, std::string> frozen_before;
  for (const auto& n : frozen) frozen_before[n] = dataio::tensor_sha256(params.value(n));

  const Split train = labelled_split(ds, dataio::Split::kTrain, cfg.task);
  const Split dev = labelled_split(ds, dataio::Split::kDev, cfg.task);

  // Frozen encoders are deterministic functions of the record, so their
  // outputs are computed once.
  struct Cached {
    Tensor a;
    Tensor b;
  };
  auto cache = [&](const Split& s) {
    std::vector<Cached> out;
    out.reserve(s.rows.size());
    for (const auto* r : s.rows) {
      if (r->speech.empty() || r->text.empty()) {
        throw ValidationError("record '" + r->id + "' lacks speech or text features");
      }
      Tape tape;
      if (spec.head.fusion == FusionKind::kConcat) {
        auto sv = model::encoder_forward(tape, params, *spec.speech, tape.constant(r->speech));
        auto tv = model::encoder_forward(tape, params, *spec.text, tape.constant(r->text));
        out.push_back({model::concat_fuse(sv, tv).value(), {}});
      } else {
        auto sv = model::encoder_frames(tape, params, *spec.speech, tape.constant(r->speech));
        auto tv = model::encoder_frames(tape, params, *spec.text, tape.constant(r->text));
        out.push_back({sv.value(), tv.value()});
      }
    }
    return out;
  };
  const auto train_cache = cache(train);
  const auto dev_cache = cache(dev);

  auto forward_on = [&spec](const std::vector<Cached>& c) {
    return [&spec, &c](Tape& tape, const ParamStore& p, std::size_t i) {
      Var fused = spec.head.fusion == FusionKind::kConcat
                      ? tape.constant(c[i].a)
                      : model::cross_attention_fuse(tape, p, *spec.xattn, tape.constant(c[i].a), tape.constant(c[i].b))
                            .fused;
      return model::fusion_head_forward(tape, p, spec.head, fused);
    };
  };
  auto loop = run_loop(cfg, params, trainable, train, dev, forward_on(train_cache), forward_on(dev_cache));

  nlohmann::json frozen_sha = nlohmann::json::object();
  for (const auto& n : frozen) {
    const auto after = dataio::tensor_sha256(loop.best.value(n));
    if (after != frozen_before[n] || dataio::tensor_sha256(params.value(n)) != frozen_before[n]) {
      throw NumericError("frozen tensor '" + n + "' changed during stage-2 training");
    }
    frozen_sha[n] = after;
  }

  TrainResult result;
  result.checkpoint.params = std::move(loop.best);
  result.checkpoint.metadata = {{"stage", 2},
                                {"task", model::to_string(cfg.task)},
                                {"model", spec.to_json()},
                                {"config", cfg.to_json()},
                                {"seed", cfg.seed},
                                {"best_epoch", loop.best_epoch},
                                {"dev", loop.best_dev},
                                {"sources", {{"speech", checkpoint_id(speech)}, {"text", checkpoint_id(text)}}},
                                {"source_tasks",
                                 {{"speech", speech.metadata.value("task", "")}, {"text", text.metadata.value("task", "")}}},
                                {"fusion_order", {"speech", "text"}},
                                {"trainable", names_json(trainable)},
                                {"frozen", names_json(frozen)},
                                {"frozen_sha256", frozen_sha}};
  result.log = std::move(loop.log);
  result.best_epoch = loop.best_epoch;
  return result;
}

}  // namespace serlab::trainer
