#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace serlab::cli {

// Everything needed to rerun a command and check that it reproduces the
// same bytes. Deliberately free of timestamps.
struct RunManifest {
  std::vector<std::string> args;  // effective arguments, config files expanded
  std::string cwd;
  nlohmann::json config = nlohmann::json::object();
  std::optional<std::uint64_t> seed;
  std::map<std::string, std::string> inputs;   // path -> sha256
  std::map<std::string, std::string> outputs;  // path -> sha256

  void add_input(const std::filesystem::path& p);
  void add_output(const std::filesystem::path& p);
  // sha256 over the sorted "path\0digest\n" lines of the outputs.
  std::string content_hash() const;

  nlohmann::json to_json() const;
  static RunManifest from_json(const nlohmann::json& j);
  void write(const std::filesystem::path& path) const;
  static RunManifest read(const std::filesystem::path& path);
};

}  // namespace serlab::cli
