#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace serlab::cli {

// Lines of `key = value`; blank lines and `#` comments are skipped. Each
// entry becomes "--key=value".
std::vector<std::string> read_config_args(const std::filesystem::path& path);

// Replaces "--config FILE" / "--config=FILE" with the file's entries,
// placed before every other option so that command-line flags win.
// `leaf` is the number of leading subcommand tokens.
std::vector<std::string> expand_config(const std::vector<std::string>& args, std::size_t leaf,
                                       std::vector<std::filesystem::path>* used = nullptr);

}  // namespace serlab::cli
