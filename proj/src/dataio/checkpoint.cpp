#include "serlab/dataio/checkpoint.hpp"

#include <limits>

#include "serlab/common/error.hpp"
#include "serlab/common/hash.hpp"
#include "serlab/dataio/binary_io.hpp"

namespace serlab::dataio {

namespace {
constexpr std::string_view kMagic = "FCKP";
}

void Checkpoint::require(std::span<const std::string> names) const {
  for (const auto& name : names) {
    if (!params.contains(name)) throw ValidationError("checkpoint is missing tensor '" + name + "'");
  }
}

int Checkpoint::stage() const {
  auto it = metadata.find("stage");
  if (it == metadata.end() || !it->is_number_integer()) return 0;
  return it->get<int>();
}

std::string encode_checkpoint(const Checkpoint& ckpt) {
  ByteWriter w;
  w.bytes(kMagic);
  w.u32(kCheckpointVersion);
  const std::string meta = ckpt.metadata.dump();
  if (meta.size() > std::numeric_limits<std::uint32_t>::max()) throw ValidationError("checkpoint metadata too large");
  w.u32(static_cast<std::uint32_t>(meta.size()));
  w.bytes(meta);
  w.u64(ckpt.params.size());
  for (const auto& [name, t] : ckpt.params.values()) {
    if (name.empty() || name.size() > std::numeric_limits<std::uint16_t>::max()) {
      throw ValidationError("tensor name length must be 1..65535");
    }
    w.u16(static_cast<std::uint16_t>(name.size()));
    w.bytes(name);
    w.u32(static_cast<std::uint32_t>(t.rank()));
    for (auto d : t.shape()) w.u64(d);
    for (double v : t.data()) w.f64(v);
  }
  return w.take();
}

Checkpoint decode_checkpoint(std::string_view bytes) {
  ByteReader r(bytes);
  if (r.remaining() < kMagic.size() || bytes.substr(0, kMagic.size()) != kMagic) {
    throw FormatError("bad FCKP magic", 0);
  }
  r.bytes(kMagic.size(), "magic");
  const std::size_t version_at = r.offset();
  if (r.u32("version") != kCheckpointVersion) throw FormatError("unsupported FCKP version", version_at);
  const std::uint32_t meta_len = r.u32("metadata length");
  const std::size_t meta_at = r.offset();
  auto meta = r.bytes(meta_len, "metadata");
  Checkpoint ckpt;
  ckpt.metadata = nlohmann::json::parse(meta, nullptr, false);
  if (ckpt.metadata.is_discarded() || !ckpt.metadata.is_object()) {
    throw FormatError("checkpoint metadata is not a JSON object", meta_at);
  }
  const std::uint64_t count = r.u64("tensor count");
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::size_t name_at = r.offset();
    const std::uint16_t name_len = r.u16("name length");
    if (name_len == 0) throw FormatError("empty tensor name", name_at);
    std::string name(r.bytes(name_len, "tensor name"));
    const std::size_t rank_at = r.offset();
    const std::uint32_t rank = r.u32("rank");
    if (rank == 0 || rank > 8) throw FormatError("tensor '" + name + "' has invalid rank", rank_at);
    numerics::Shape shape(rank);
    std::uint64_t n = 1;
    for (auto& d : shape) {
      const std::size_t dim_at = r.offset();
      d = r.u64("dimension");
      if (d == 0 || d > r.remaining()) throw FormatError("tensor '" + name + "' has invalid extent", dim_at);
      n *= d;
      if (n > r.remaining()) throw FormatError("truncated data of tensor '" + name + "'", dim_at);
    }
    if (n * 8 > r.remaining()) throw FormatError("truncated data of tensor '" + name + "'", r.offset());
    std::vector<double> data(n);
    for (auto& v : data) v = r.f64("tensor data");
    if (ckpt.params.contains(name)) throw FormatError("duplicate tensor '" + name + "'", name_at);
    ckpt.params.add(name, numerics::Tensor(std::move(shape), std::move(data)));
  }
  if (!r.done()) throw FormatError("trailing bytes after FCKP tensors", r.offset());
  return ckpt;
}

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  write_file(path, encode_checkpoint(ckpt));
}

Checkpoint read_checkpoint(const std::filesystem::path& path) { return decode_checkpoint(read_file(path)); }

std::string tensor_sha256(const numerics::Tensor& t) {
  ByteWriter w;
  w.u32(static_cast<std::uint32_t>(t.rank()));
  for (auto d : t.shape()) w.u64(d);
  for (double v : t.data()) w.f64(v);
  return sha256_hex(std::string_view(w.str()));
}

}  // namespace serlab::dataio
