#pragma once

#include "serlab/dataio/synthetic.hpp"
#include "serlab/trainer/config.hpp"

namespace serlab::testing {

// Separable data: class direction at 5 noise standard deviations, 8 equal
// classes, 250 train / 50 dev / 50 test1 utterances per class.
inline dataio::SynthConfig separable_config(std::uint64_t seed) {
  dataio::SynthConfig cfg;
  cfg.counts.fill(350);
  cfg.separation = 1.25;
  cfg.noise = 0.25;
  cfg.train_fraction = 5.0 / 7.0;
  cfg.dev_fraction = 1.0 / 7.0;
  cfg.seed = seed;
  return cfg;
}

inline dataio::SynthConfig small_config(std::uint64_t seed, std::size_t per_class = 12) {
  dataio::SynthConfig cfg;
  cfg.counts.fill(per_class);
  cfg.speech_dim = 6;
  cfg.text_dim = 5;
  cfg.min_frames = 2;
  cfg.max_frames = 5;
  cfg.train_fraction = 0.5;
  cfg.dev_fraction = 0.25;
  cfg.seed = seed;
  return cfg;
}

inline trainer::TrainConfig small_stage1(model::Modality m, model::Task task, std::uint64_t seed) {
  trainer::TrainConfig cfg = trainer::TrainConfig::defaults(1);
  cfg.modality = m;
  cfg.task = task;
  cfg.hidden = 6;
  cfg.attention_dim = 3;
  cfg.embed = 5;
  cfg.batch_size = 16;
  cfg.learning_rate = 5e-3;
  cfg.epochs = 3;
  cfg.seed = seed;
  return cfg;
}

inline trainer::TrainConfig small_stage2(model::FusionKind fusion, model::Task task, std::uint64_t seed) {
  trainer::TrainConfig cfg = trainer::TrainConfig::defaults(2);
  cfg.fusion = fusion;
  cfg.task = task;
  cfg.xattn_dim = 4;
  cfg.batch_size = 16;
  cfg.learning_rate = 2e-2;
  cfg.epochs = 3;
  cfg.seed = seed;
  return cfg;
}

}  // namespace serlab::testing
