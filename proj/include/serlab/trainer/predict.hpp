#pragma once

#include <optional>
#include <span>

#include "serlab/dataio/checkpoint.hpp"
#include "serlab/dataio/dataset.hpp"
#include "serlab/numerics/autodiff.hpp"
#include "serlab/trainer/config.hpp"

namespace serlab::trainer {

using dataio::PredictionSet;
using dataio::UtteranceRecord;

// Raw model output for one record: 8 logits or (arousal, valence, dominance).
numerics::Var model_forward(numerics::Tape& tape, const numerics::ParamStore& params, const ModelSpec& spec,
                            const UtteranceRecord& record);
numerics::Tensor model_output(const numerics::ParamStore& params, const ModelSpec& spec, const UtteranceRecord& record);

// First maximum wins.
metrics::Emotion argmax_emotion(std::span<const double> logits);
metrics::AttributeVector attribute_output(std::span<const double> out, bool clamp);

struct PredictOptions {
  bool clamp = false;
  // When set, the checkpoint's task must match.
  std::optional<Task> task;
};

ModelSpec checkpoint_spec(const dataio::Checkpoint& ckpt);

PredictionSet predict(const dataio::Checkpoint& ckpt, std::span<const UtteranceRecord* const> records,
                      const PredictOptions& opts = {});
PredictionSet predict(const dataio::Checkpoint& ckpt, const dataio::Dataset& ds, std::optional<dataio::Split> split,
                      const PredictOptions& opts = {});

}  // namespace serlab::trainer
