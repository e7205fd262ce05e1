#include "serlab/cli/config_file.hpp"

#include <fstream>

#include "serlab/common/error.hpp"

namespace serlab::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<std::string> read_config_args(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("--config: cannot open '" + path.string() + "'");
  std::vector<std::string> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ValidationError(path.filename().string() + " line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty()) {
      throw ValidationError(path.filename().string() + " line " + std::to_string(line_no) + ": empty key");
    }
    out.push_back("--" + key + "=" + value);
  }
  return out;
}

std::vector<std::string> expand_config(const std::vector<std::string>& args, std::size_t leaf,
                                       std::vector<std::filesystem::path>* used) {
  std::vector<std::string> head(args.begin(), args.begin() + static_cast<std::ptrdiff_t>(std::min(leaf, args.size())));
  std::vector<std::string> from_files;
  std::vector<std::string> rest;
  for (std::size_t i = head.size(); i < args.size(); ++i) {
    std::string file;
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw ValidationError("--config: missing file argument");
      file = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      file = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
      continue;
    }
    auto entries = read_config_args(file);
    from_files.insert(from_files.end(), entries.begin(), entries.end());
    if (used) used->push_back(file);
  }
  head.insert(head.end(), from_files.begin(), from_files.end());
  head.insert(head.end(), rest.begin(), rest.end());
  return head;
}

}  // namespace serlab::cli
