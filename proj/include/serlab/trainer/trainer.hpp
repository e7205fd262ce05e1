#pragma once

#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "serlab/dataio/checkpoint.hpp"
#include "serlab/dataio/dataset.hpp"
#include "serlab/metrics/report.hpp"
#include "serlab/trainer/config.hpp"

namespace serlab::trainer {

struct EpochLog {
  std::size_t epoch = 0;  // 0 is the untrained model
  double train_loss = 0.0;
  std::size_t steps = 0;
  double dev_score = 0.0;
  nlohmann::json dev;

  nlohmann::json to_json() const;
};

struct TrainResult {
  dataio::Checkpoint checkpoint;
  std::vector<EpochLog> log;
  std::size_t best_epoch = 0;
};

// Encoder plus task head trained end to end on the train split; the
// checkpoint holds the parameters of the best dev epoch.
TrainResult train_stage1(const TrainConfig& cfg, const dataio::Dataset& ds);

// Loads the speech encoder from `speech` and the text encoder from `text`
// (both stage-1 checkpoints), keeps them fixed, and trains head.* plus
// xattn.* when cross-attention is selected.
TrainResult train_stage2(const TrainConfig& cfg, const dataio::Checkpoint& speech, const dataio::Checkpoint& text,
                         const dataio::Dataset& ds);

// SHA-256 of the encoded checkpoint, which equals the file's digest.
std::string checkpoint_id(const dataio::Checkpoint& ckpt);

// Joins predictions to labelled records by id. Each label kind that occurs
// anywhere in `pred` is scored; records lacking a prediction of that kind
// are counted in `missing`.
metrics::MetricsReport score_predictions(const dataio::PredictionSet& pred,
                                         std::span<const dataio::UtteranceRecord* const> truth);

// "<dev-selection metric> of a report": F1-macro or mean CCC.
double selection_score(const metrics::MetricsReport& report, Task task);

}  // namespace serlab::trainer
