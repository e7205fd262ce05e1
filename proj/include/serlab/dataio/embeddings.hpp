#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "serlab/numerics/tensor.hpp"

namespace serlab::dataio {

// FEMB: "FEMB", u32 version, u32 D, u64 count, then per record
// u16 id length, id bytes, u32 T, T*D float32. All little-endian.
inline constexpr std::uint32_t kEmbeddingVersion = 1;

struct EmbeddingRecord {
  std::string id;
  // T x D. Values are stored as float32, so anything not already
  // representable in float32 is rounded on write.
  numerics::Tensor frames;
};

struct EmbeddingFile {
  std::uint32_t dim = 0;
  std::vector<EmbeddingRecord> records;
};

std::string encode_embeddings(const EmbeddingFile& file);
EmbeddingFile decode_embeddings(std::string_view bytes);

void write_embeddings(const std::filesystem::path& path, const EmbeddingFile& file);
EmbeddingFile read_embeddings(const std::filesystem::path& path);

// Rounds every entry through float32.
numerics::Tensor round_to_f32(numerics::Tensor t);

}  // namespace serlab::dataio
