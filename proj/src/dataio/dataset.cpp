#include "serlab/dataio/dataset.hpp"

#include <unordered_map>

#include "serlab/common/error.hpp"
#include "serlab/dataio/embeddings.hpp"

namespace serlab::dataio {

std::vector<const UtteranceRecord*> Dataset::split(Split s) const {
  std::vector<const UtteranceRecord*> out;
  for (const auto& r : records) {
    if (r.split == s) out.push_back(&r);
  }
  return out;
}

namespace {

void attach(Dataset& ds, const std::unordered_map<std::string, std::size_t>& index, const std::filesystem::path& path,
            bool speech) {
  auto file = read_embeddings(path);
  (speech ? ds.speech_dim : ds.text_dim) = file.dim;
  for (auto& rec : file.records) {
    auto it = index.find(rec.id);
    if (it == index.end()) {
      throw ValidationError(path.filename().string() + ": id '" + rec.id + "' has no label row");
    }
    auto& slot = speech ? ds.records[it->second].speech : ds.records[it->second].text;
    if (!slot.empty()) throw ValidationError(path.filename().string() + ": duplicate id '" + rec.id + "'");
    slot = std::move(rec.frames);
  }
}

}  // namespace

Dataset load_dataset(const std::filesystem::path& labels, const std::optional<std::filesystem::path>& speech,
                     const std::optional<std::filesystem::path>& text) {
  Dataset ds;
  std::unordered_map<std::string, std::size_t> index;
  for (auto& row : read_labels(labels)) {
    index.emplace(row.id, ds.records.size());
    ds.records.push_back({row.id, row.split, {}, {}, row.emotion, row.attributes});
  }
  if (speech) attach(ds, index, *speech, true);
  if (text) attach(ds, index, *text, false);
  return ds;
}

Dataset load_dataset_dir(const std::filesystem::path& dir) {
  auto opt = [&](const char* name) -> std::optional<std::filesystem::path> {
    auto p = dir / name;
    if (std::filesystem::exists(p)) return p;
    return std::nullopt;
  };
  if (!std::filesystem::exists(dir / kLabelsFile)) {
    throw ValidationError("dataset directory '" + dir.string() + "' has no " + kLabelsFile);
  }
  return load_dataset(dir / kLabelsFile, opt(kSpeechFile), opt(kTextFile));
}

std::vector<std::filesystem::path> save_dataset(const std::filesystem::path& dir, const Dataset& ds) {
  std::vector<LabelRow> rows;
  EmbeddingFile speech{ds.speech_dim, {}};
  EmbeddingFile text{ds.text_dim, {}};
  for (const auto& r : ds.records) {
    rows.push_back({r.id, r.split, r.emotion, r.attributes});
    if (!r.speech.empty()) speech.records.push_back({r.id, r.speech});
    if (!r.text.empty()) text.records.push_back({r.id, r.text});
  }
  std::vector<std::filesystem::path> written;
  if (ds.speech_dim > 0) {
    write_embeddings(dir / kSpeechFile, speech);
    written.push_back(dir / kSpeechFile);
  }
  if (ds.text_dim > 0) {
    write_embeddings(dir / kTextFile, text);
    written.push_back(dir / kTextFile);
  }
  write_labels(dir / kLabelsFile, rows);
  written.push_back(dir / kLabelsFile);
  return written;
}

}  // namespace serlab::dataio
