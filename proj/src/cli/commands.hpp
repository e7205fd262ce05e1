#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "serlab/cli/manifest.hpp"
#include "serlab/dataio/dataset.hpp"

namespace serlab::cli {

struct Env {
  std::ostream& out;
  std::ostream& err;
  std::vector<std::string> args;  // effective, config files expanded
  std::vector<std::filesystem::path> config_files;
};

struct Registry {
  std::vector<std::pair<CLI::App*, std::function<int()>>> handlers;

  void add(CLI::App* app, std::function<int()> fn) { handlers.emplace_back(app, std::move(fn)); }
};

void register_commands(CLI::App& app, Env& env, Registry& reg);
void register_sweeps(CLI::App& app, Env& env, Registry& reg);

// Shared helpers.
std::optional<dataio::Split> parse_split_flag(const std::string& value);
std::vector<dataio::UtteranceRecord> load_truth(const std::string& data_dir, const std::string& labels,
                                                std::optional<dataio::Split> split, RunManifest& manifest);
std::vector<const dataio::UtteranceRecord*> pointers(const std::vector<dataio::UtteranceRecord>& rows);
void finish_manifest(Env& env, RunManifest& m, const std::filesystem::path& primary, const std::string& override_path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace serlab::cli
