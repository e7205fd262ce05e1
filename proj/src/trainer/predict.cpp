#include "serlab/trainer/predict.hpp"

#include <algorithm>

#include "serlab/common/error.hpp"
#include "serlab/model/encoders.hpp"
#include "serlab/model/fusion.hpp"

namespace serlab::trainer {

namespace {

numerics::Var features(numerics::Tape& tape, const UtteranceRecord& record, Modality modality) {
  const auto& t = modality == Modality::kSpeech ? record.speech : record.text;
  if (t.empty()) {
    throw ValidationError("record '" + record.id + "' has no " + model::to_string(modality) +
                          " features but the checkpoint needs them");
  }
  return tape.constant(t);
}

}  // namespace

numerics::Var model_forward(numerics::Tape& tape, const numerics::ParamStore& params, const ModelSpec& spec,
                            const UtteranceRecord& record) {
  numerics::Var fused;
  if (spec.stage == 1) {
    const auto& enc = spec.speech ? *spec.speech : *spec.text;
    fused = model::encoder_forward(tape, params, enc, features(tape, record, enc.modality));
  } else if (spec.head.fusion == FusionKind::kConcat) {
    auto s = model::encoder_forward(tape, params, *spec.speech, features(tape, record, Modality::kSpeech));
    auto t = model::encoder_forward(tape, params, *spec.text, features(tape, record, Modality::kText));
    fused = model::concat_fuse(s, t);
  } else {
    auto s = model::encoder_frames(tape, params, *spec.speech, features(tape, record, Modality::kSpeech));
    auto t = model::encoder_frames(tape, params, *spec.text, features(tape, record, Modality::kText));
    fused = model::cross_attention_fuse(tape, params, *spec.xattn, s, t).fused;
  }
  return model::fusion_head_forward(tape, params, spec.head, fused);
}

numerics::Tensor model_output(const numerics::ParamStore& params, const ModelSpec& spec,
                              const UtteranceRecord& record) {
  numerics::Tape tape;
  return model_forward(tape, params, spec, record).value();
}

metrics::Emotion argmax_emotion(std::span<const double> logits) {
  if (logits.size() != metrics::kNumEmotions) throw ValidationError("argmax_emotion: expected 8 logits");
  const auto it = std::max_element(logits.begin(), logits.end());
  return metrics::emotion_from_index(static_cast<std::size_t>(it - logits.begin()));
}

metrics::AttributeVector attribute_output(std::span<const double> out, bool clamp) {
  if (out.size() != 3) throw ValidationError("attribute_output: expected 3 values");
  metrics::AttributeVector a{out[0], out[1], out[2]};
  return clamp ? a.clamped() : a;
}

ModelSpec checkpoint_spec(const dataio::Checkpoint& ckpt) {
  auto it = ckpt.metadata.find("model");
  if (it == ckpt.metadata.end()) throw ValidationError("checkpoint metadata has no model description");
  return ModelSpec::from_json(*it);
}

PredictionSet predict(const dataio::Checkpoint& ckpt, std::span<const UtteranceRecord* const> records,
                      const PredictOptions& opts) {
  const ModelSpec spec = checkpoint_spec(ckpt);
  if (opts.task && *opts.task != spec.task) {
    throw ValidationError("checkpoint was trained for the " + model::to_string(spec.task) + " task, not " +
                          model::to_string(*opts.task));
  }
  PredictionSet set;
  set.items.reserve(records.size());
  for (const auto* r : records) {
    const auto out = model_output(ckpt.params, spec, *r);
    dataio::Prediction p{r->id, {}, {}};
    if (spec.task == Task::kCategorical) {
      p.emotion = argmax_emotion(out.data());
    } else {
      p.attributes = attribute_output(out.data(), opts.clamp);
    }
    set.items.push_back(std::move(p));
  }
  return set;
}

PredictionSet predict(const dataio::Checkpoint& ckpt, const dataio::Dataset& ds, std::optional<dataio::Split> split,
                      const PredictOptions& opts) {
  std::vector<const UtteranceRecord*> rows;
  for (const auto& r : ds.records) {
    if (!split || r.split == *split) rows.push_back(&r);
  }
  return predict(ckpt, rows, opts);
}

}  // namespace serlab::trainer
