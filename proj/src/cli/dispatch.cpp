#include "serlab/cli/dispatch.hpp"

#include <algorithm>
#include <iostream>

#include "commands.hpp"
#include "serlab/cli/config_file.hpp"
#include "serlab/common/error.hpp"
#include "serlab/common/hash.hpp"

namespace serlab::cli {

namespace fs = std::filesystem;

namespace {

struct ReplayOpts {
  std::string manifest;
};

// Reruns the recorded arguments from the recorded directory and compares
// every output digest.
int exec_replay(const ReplayOpts& o, Env& env) {
  const auto recorded = RunManifest::read(o.manifest);
  if (!recorded.args.empty() && recorded.args.front() == "replay") {
    throw ValidationError("manifest records a replay, not an artifact-producing command");
  }
  const fs::path here = fs::current_path();
  fs::current_path(recorded.cwd);
  int code = 0;
  std::vector<std::string> mismatched;
  try {
    for (const auto& [path, digest] : recorded.inputs) {
      if (!fs::exists(path) || sha256_file(path) != digest) {
        throw ValidationError("input '" + path + "' is missing or differs from the manifest");
      }
    }
    code = run(recorded.args, env.out, env.err);
    if (code == 0) {
      for (const auto& [path, digest] : recorded.outputs) {
        if (!fs::exists(path) || sha256_file(path) != digest) mismatched.push_back(path);
      }
    }
  } catch (...) {
    fs::current_path(here);
    throw;
  }
  fs::current_path(here);
  if (code != 0) return code;
  if (!mismatched.empty()) {
    for (const auto& p : mismatched) env.err << "replay: output differs: " << p << "\n";
    return kExitRuntime;
  }
  env.out << "replay: " << recorded.outputs.size() << " outputs reproduced (content hash "
          << recorded.content_hash() << ")\n";
  return kExitOk;
}

std::size_t leaf_depth(const std::vector<std::string>& args) {
  if (args.empty()) return 0;
  static const char* nested[] = {"analyze", "llm", "sweep"};
  const bool two = std::any_of(std::begin(nested), std::end(nested), [&](const char* n) { return args[0] == n; });
  return two && args.size() >= 2 && args[1].rfind("-", 0) != 0 ? 2 : 1;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Env env{out, err, {}, {}};
  try {
    env.args = expand_config(args, leaf_depth(args), &env.config_files);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }

  CLI::App app{"Dual-modality speech emotion recognition lab", "serlab"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast)->always_capture_default();
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every subcommand");
  Registry reg;
  register_commands(app, env, reg);
  register_sweeps(app, env, reg);
  auto replay = std::make_shared<ReplayOpts>();
  auto* sub = app.add_subcommand("replay", "Rerun the command recorded in a manifest and verify its outputs");
  sub->add_option("--manifest", replay->manifest, "Run manifest")->required()->check(CLI::ExistingFile);
  reg.add(sub, [replay, &env] { return exec_replay(*replay, env); });

  std::vector<std::string> reversed(env.args.rbegin(), env.args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    for (const auto& [cmd, fn] : reg.handlers) {
      if (cmd->parsed()) return fn();
    }
    err << "error: no command selected\n";
    return kExitValidation;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const FormatError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace serlab::cli
