#include "serlab/dataio/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "serlab/common/error.hpp"
#include "serlab/common/rng.hpp"
#include "serlab/dataio/embeddings.hpp"

namespace serlab::dataio {

void SynthConfig::validate() const {
  const auto nonzero = std::count_if(counts.begin(), counts.end(), [](std::size_t c) { return c > 0; });
  if (nonzero < 2) throw ValidationError("synthetic config: at least two classes need samples");
  if (speech_dim == 0 || text_dim == 0) throw ValidationError("synthetic config: dimensions must be positive");
  if (min_frames == 0 || max_frames < min_frames) throw ValidationError("synthetic config: need 1 <= min_frames <= max_frames");
  if (!(noise > 0.0) || !std::isfinite(noise)) throw ValidationError("synthetic config: noise must be > 0");
  if (!(separation >= 0.0) || !std::isfinite(separation)) throw ValidationError("synthetic config: separation must be >= 0");
  for (const auto& a : anchors) {
    if (!a.in_range()) throw ValidationError("synthetic config: anchors must lie in [1,7]");
  }
  if (!(train_fraction >= 0.0 && dev_fraction >= 0.0 && train_fraction + dev_fraction <= 1.0 + 1e-12)) {
    throw ValidationError("synthetic config: split fractions must be non-negative and sum to at most 1");
  }
  if (!emotions && !attributes) throw ValidationError("synthetic config: need emotions, attributes or both");
}

namespace {

std::vector<std::vector<double>> class_directions(Rng& rng, std::uint32_t dim) {
  std::vector<std::vector<double>> dirs(metrics::kNumEmotions, std::vector<double>(dim));
  for (auto& d : dirs) {
    double norm = 0.0;
    do {
      norm = 0.0;
      for (auto& v : d) {
        v = rng.normal();
        norm += v * v;
      }
    } while (norm < 1e-12);
    norm = std::sqrt(norm);
    for (auto& v : d) v /= norm;
  }
  return dirs;
}

numerics::Tensor draw_frames(Rng& rng, const SynthConfig& cfg, const std::vector<double>& dir) {
  const std::uint32_t span = cfg.max_frames - cfg.min_frames + 1;
  const std::size_t t = cfg.min_frames + static_cast<std::size_t>(rng.below(span));
  const std::size_t d = dir.size();
  std::vector<double> data(t * d);
  for (std::size_t i = 0; i < t; ++i) {
    for (std::size_t j = 0; j < d; ++j) data[i * d + j] = cfg.separation * dir[j] + cfg.noise * rng.normal();
  }
  return round_to_f32(numerics::Tensor({t, d}, std::move(data)));
}

}  // namespace

Dataset gen_synthetic(const SynthConfig& cfg) {
  cfg.validate();
  Rng dir_rng(derive_seed(cfg.seed, 1));
  const auto speech_dirs = class_directions(dir_rng, cfg.speech_dim);
  const auto text_dirs = class_directions(dir_rng, cfg.text_dim);

  Rng rng(derive_seed(cfg.seed, 2));
  std::vector<UtteranceRecord> records;
  for (std::size_t c = 0; c < metrics::kNumEmotions; ++c) {
    const std::size_t n = cfg.counts[c];
    const auto n_train = std::min<std::size_t>(n, static_cast<std::size_t>(std::llround(cfg.train_fraction * n)));
    const auto n_dev = std::min<std::size_t>(n - n_train, static_cast<std::size_t>(std::llround(cfg.dev_fraction * n)));
    for (std::size_t k = 0; k < n; ++k) {
      UtteranceRecord r;
      r.split = k < n_train ? Split::kTrain : (k < n_train + n_dev ? Split::kDev : Split::kTest1);
      r.speech = draw_frames(rng, cfg, speech_dirs[c]);
      r.text = draw_frames(rng, cfg, text_dirs[c]);
      const auto& anchor = cfg.anchors[c];
      AttributeVector a{anchor.arousal + cfg.noise * rng.normal(), anchor.valence + cfg.noise * rng.normal(),
                        anchor.dominance + cfg.noise * rng.normal()};
      if (cfg.emotions) r.emotion = metrics::emotion_from_index(c);
      if (cfg.attributes) r.attributes = a.clamped();
      records.push_back(std::move(r));
    }
  }
  rng.shuffle(std::span<UtteranceRecord>(records));
  for (std::size_t i = 0; i < records.size(); ++i) {
    char id[32];
    std::snprintf(id, sizeof id, "syn%06zu", i);
    records[i].id = id;
  }
  return {cfg.speech_dim, cfg.text_dim, std::move(records)};
}

}  // namespace serlab::dataio
