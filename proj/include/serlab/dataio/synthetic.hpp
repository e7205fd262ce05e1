#pragma once

#include <array>
#include <cstdint>

#include "serlab/dataio/dataset.hpp"

namespace serlab::dataio {

// Class c gets a random unit direction per modality; every frame is
// separation * dir_c + N(0, noise^2) per dimension. Attributes are the
// class anchor plus N(0, noise^2), clamped to [1, 7].
struct SynthConfig {
  std::array<std::size_t, 8> counts{100, 100, 100, 100, 100, 100, 100, 100};
  std::uint32_t speech_dim = 16;
  std::uint32_t text_dim = 16;
  std::uint32_t min_frames = 4;
  std::uint32_t max_frames = 12;
  double separation = 1.25;
  double noise = 0.25;
  // arousal, valence, dominance per class in A, C, D, F, H, N, S, U order.
  std::array<AttributeVector, 8> anchors{{{6.0, 2.0, 5.5},
                                          {4.0, 2.5, 5.0},
                                          {4.5, 2.0, 4.5},
                                          {5.5, 2.0, 2.5},
                                          {5.5, 6.0, 5.0},
                                          {4.0, 4.0, 4.0},
                                          {2.5, 2.0, 3.0},
                                          {6.0, 4.5, 4.0}}};
  // Stratified per class; the remainder goes to test1.
  double train_fraction = 0.70;
  double dev_fraction = 0.15;
  bool emotions = true;
  bool attributes = true;
  std::uint64_t seed = 0;

  void validate() const;
};

Dataset gen_synthetic(const SynthConfig& cfg);

}  // namespace serlab::dataio
