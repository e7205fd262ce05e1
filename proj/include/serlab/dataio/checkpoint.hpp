#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>

#include <json.hpp>

#include "serlab/numerics/param_store.hpp"

namespace serlab::dataio {

// FCKP: "FCKP", u32 version, u32 metadata length, metadata JSON (UTF-8),
// u64 tensor count, then per tensor u16 name length, name, u32 rank,
// rank x u64 dims, float64 data. All little-endian; tensors in name order.
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  nlohmann::json metadata = nlohmann::json::object();
  numerics::ParamStore params;

  // Throws naming the first tensor in `names` that is absent.
  void require(std::span<const std::string> names) const;
  // metadata["stage"], or 0 when absent.
  int stage() const;
};

std::string encode_checkpoint(const Checkpoint& ckpt);
Checkpoint decode_checkpoint(std::string_view bytes);

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint read_checkpoint(const std::filesystem::path& path);

// SHA-256 of one tensor's shape and raw float64 bytes.
std::string tensor_sha256(const numerics::Tensor& t);

}  // namespace serlab::dataio
