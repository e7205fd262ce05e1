#include "serlab/cli/manifest.hpp"

#include "serlab/common/error.hpp"
#include "serlab/common/hash.hpp"
#include "serlab/dataio/binary_io.hpp"

namespace serlab::cli {

void RunManifest::add_input(const std::filesystem::path& p) { inputs[p.string()] = sha256_file(p); }
void RunManifest::add_output(const std::filesystem::path& p) { outputs[p.string()] = sha256_file(p); }

std::string RunManifest::content_hash() const {
  std::string acc;
  for (const auto& [path, digest] : outputs) {
    acc += path;
    acc += '\0';
    acc += digest;
    acc += '\n';
  }
  return sha256_hex(std::string_view(acc));
}

nlohmann::json RunManifest::to_json() const {
  nlohmann::json j = {{"args", args},
                      {"cwd", cwd},
                      {"config", config},
                      {"inputs", inputs},
                      {"outputs", outputs},
                      {"content_hash", content_hash()}};
  j["seed"] = seed ? nlohmann::json(*seed) : nlohmann::json(nullptr);
  return j;
}

RunManifest RunManifest::from_json(const nlohmann::json& j) {
  try {
    RunManifest m;
    m.args = j.at("args").get<std::vector<std::string>>();
    m.cwd = j.at("cwd").get<std::string>();
    m.config = j.value("config", nlohmann::json::object());
    if (j.contains("seed") && !j["seed"].is_null()) m.seed = j["seed"].get<std::uint64_t>();
    m.inputs = j.at("inputs").get<std::map<std::string, std::string>>();
    m.outputs = j.at("outputs").get<std::map<std::string, std::string>>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed manifest: ") + e.what());
  }
}

void RunManifest::write(const std::filesystem::path& path) const {
  dataio::write_file(path, to_json().dump(2) + "\n");
}

RunManifest RunManifest::read(const std::filesystem::path& path) {
  auto j = nlohmann::json::parse(dataio::read_file(path), nullptr, false);
  if (j.is_discarded()) throw ValidationError("manifest '" + path.string() + "' is not valid JSON");
  return from_json(j);
}

}  // namespace serlab::cli
