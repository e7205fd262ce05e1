#include "serlab/dataio/embeddings.hpp"

#include <limits>

#include "serlab/common/error.hpp"
#include "serlab/dataio/binary_io.hpp"

namespace serlab::dataio {

namespace {
constexpr std::string_view kMagic = "FEMB";
}

numerics::Tensor round_to_f32(numerics::Tensor t) {
  for (double& v : t.data()) v = static_cast<double>(static_cast<float>(v));
  return t;
}

std::string encode_embeddings(const EmbeddingFile& file) {
  if (file.dim == 0) throw ValidationError("embedding dimension must be positive");
  ByteWriter w;
  w.bytes(kMagic);
  w.u32(kEmbeddingVersion);
  w.u32(file.dim);
  w.u64(file.records.size());
  for (const auto& rec : file.records) {
    if (rec.id.empty() || rec.id.size() > std::numeric_limits<std::uint16_t>::max()) {
      throw ValidationError("embedding id length must be 1..65535");
    }
    if (rec.frames.rank() != 2 || rec.frames.cols() != file.dim) {
      throw ValidationError("record '" + rec.id + "': frames must be T x " + std::to_string(file.dim) + ", got " +
                            numerics::shape_str(rec.frames.shape()));
    }
    w.u16(static_cast<std::uint16_t>(rec.id.size()));
    w.bytes(rec.id);
    w.u32(static_cast<std::uint32_t>(rec.frames.rows()));
    for (double v : rec.frames.data()) w.f32(static_cast<float>(v));
  }
  return w.take();
}

EmbeddingFile decode_embeddings(std::string_view bytes) {
  ByteReader r(bytes);
  if (r.remaining() < kMagic.size() || bytes.substr(0, kMagic.size()) != kMagic) {
    throw FormatError("bad FEMB magic", 0);
  }
  r.bytes(kMagic.size(), "magic");
  const std::size_t version_at = r.offset();
  if (r.u32("version") != kEmbeddingVersion) throw FormatError("unsupported FEMB version", version_at);
  EmbeddingFile file;
  const std::size_t dim_at = r.offset();
  file.dim = r.u32("dimension");
  if (file.dim == 0) throw FormatError("zero FEMB dimension", dim_at);
  const std::uint64_t count = r.u64("record count");
  for (std::uint64_t i = 0; i < count; ++i) {
    EmbeddingRecord rec;
    const std::size_t id_at = r.offset();
    const std::uint16_t id_len = r.u16("id length");
    if (id_len == 0) throw FormatError("empty record id", id_at);
    rec.id = std::string(r.bytes(id_len, "record id"));
    const std::size_t t_at = r.offset();
    const std::uint32_t frames = r.u32("frame count");
    if (frames == 0) throw FormatError("record '" + rec.id + "' has no frames", t_at);
    const std::uint64_t n = static_cast<std::uint64_t>(frames) * file.dim;
    if (n * 4 > r.remaining()) throw FormatError("truncated frames of '" + rec.id + "'", r.offset());
    std::vector<double> data(n);
    for (auto& v : data) v = static_cast<double>(r.f32("frame data"));
    rec.frames = numerics::Tensor({frames, file.dim}, std::move(data));
    file.records.push_back(std::move(rec));
  }
  if (!r.done()) throw FormatError("trailing bytes after FEMB records", r.offset());
  return file;
}

void write_embeddings(const std::filesystem::path& path, const EmbeddingFile& file) {
  write_file(path, encode_embeddings(file));
}

EmbeddingFile read_embeddings(const std::filesystem::path& path) { return decode_embeddings(read_file(path)); }

}  // namespace serlab::dataio
