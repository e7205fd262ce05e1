#include <fcntl.h>
#include <spawn.h>
#include <sys/wait.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <map>

#include "commands.hpp"
#include "serlab/cli/dispatch.hpp"
#include "serlab/common/error.hpp"
#include "serlab/dataio/checkpoint.hpp"
#include "serlab/dataio/labels.hpp"
#include "serlab/metrics/report.hpp"
#include "serlab/trainer/config.hpp"
#include "serlab/trainer/predict.hpp"
#include "serlab/trainer/trainer.hpp"

extern char** environ;

namespace serlab::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Job {
  std::string name;
  std::vector<std::string> args;
};

void run_sequential(const std::vector<Job>& jobs, const fs::path& logs) {
  for (const auto& job : jobs) {
    std::ofstream log(logs / (job.name + ".log"));
    const int code = run(job.args, log, log);
    if (code != 0) {
      throw std::runtime_error("sweep job '" + job.name + "' exited with " + std::to_string(code) + ", see " +
                               (logs / (job.name + ".log")).string());
    }
  }
}

pid_t spawn(const Job& job, const std::string& exe, const fs::path& logs) {
  const std::string log = (logs / (job.name + ".log")).string();
  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_addopen(&actions, 1, log.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
  posix_spawn_file_actions_adddup2(&actions, 1, 2);
  std::vector<std::string> storage{exe};
  storage.insert(storage.end(), job.args.begin(), job.args.end());
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());
  argv.push_back(nullptr);
  pid_t pid = 0;
  const int rc = posix_spawn(&pid, exe.c_str(), &actions, nullptr, argv.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  if (rc != 0) throw std::runtime_error("cannot spawn '" + exe + "': " + std::strerror(rc));
  return pid;
}

void run_parallel(const std::vector<Job>& jobs, std::size_t parallel, const std::string& exe, const fs::path& logs) {
  std::map<pid_t, std::size_t> running;
  std::size_t next = 0;
  std::vector<std::string> failed;
  while (next < jobs.size() || !running.empty()) {
    while (next < jobs.size() && running.size() < parallel) {
      running[spawn(jobs[next], exe, logs)] = next;
      ++next;
    }
    int status = 0;
    const pid_t pid = waitpid(-1, &status, 0);
    if (pid < 0) {
      if (errno == EINTR) continue;
      throw std::runtime_error(std::string("waitpid: ") + std::strerror(errno));
    }
    auto it = running.find(pid);
    if (it == running.end()) continue;
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) failed.push_back(jobs[it->second].name);
    running.erase(it);
  }
  if (!failed.empty()) {
    std::string names;
    for (const auto& f : failed) names += (names.empty() ? "" : ", ") + f;
    throw std::runtime_error("sweep jobs failed: " + names + " (logs in " + logs.string() + ")");
  }
}

struct SweepOpts {
  std::string data;
  std::string work;
  std::string out;
  std::uint64_t seed = 0;
  double lr1 = trainer::kStage1LearningRate;
  double lr2 = trainer::kStage2LearningRate;
  std::size_t epochs1 = trainer::kStage1Epochs;
  std::size_t epochs2 = trainer::kStage2Epochs;
  std::size_t batch_size = trainer::kDefaultBatchSize;
  std::string split = "test1";
  std::size_t parallel = 1;
  std::string exe;
  std::string text_supervision = "same";
  std::string manifest;
};

class Sweep {
 public:
  Sweep(const SweepOpts& o) : o_(o), work_(o.work) {
    fs::create_directories(work_ / "logs");
  }

  std::string ckpt(const std::string& name) const { return (work_ / (name + ".fckp")).string(); }

  Job stage1(const std::string& name, const std::string& modality, const std::string& task,
             std::vector<std::string> extra = {}, bool pretrained_only = false) const {
    std::vector<std::string> a{"train-stage1", "--data", o_.data, "--out", ckpt(name), "--seed",
                               std::to_string(o_.seed), "--modality", modality, "--task", task,
                               "--batch-size", std::to_string(o_.batch_size), "--lr", fmt(o_.lr1), "--epochs",
                               pretrained_only ? "0" : std::to_string(o_.epochs1)};
    a.insert(a.end(), extra.begin(), extra.end());
    return {name, a};
  }

  Job stage2(const std::string& name, const std::string& speech, const std::string& text, const std::string& task,
             const std::string& fusion, const std::string& activation, std::vector<std::string> extra = {}) const {
    std::vector<std::string> a{"train-stage2", "--data", o_.data, "--out", ckpt(name), "--seed",
                               std::to_string(o_.seed), "--speech-ckpt", ckpt(speech), "--text-ckpt", ckpt(text),
                               "--task", task, "--fusion", fusion, "--activation", activation, "--batch-size",
                               std::to_string(o_.batch_size), "--lr", fmt(o_.lr2), "--epochs",
                               std::to_string(o_.epochs2)};
    a.insert(a.end(), extra.begin(), extra.end());
    return {name, a};
  }

  void execute(const std::vector<Job>& jobs) const {
    if (o_.parallel <= 1) {
      run_sequential(jobs, work_ / "logs");
    } else {
      const std::string exe = o_.exe.empty() ? fs::read_symlink("/proc/self/exe").string() : o_.exe;
      run_parallel(jobs, o_.parallel, exe, work_ / "logs");
    }
  }

  metrics::MetricsReport score(const std::string& name, const dataio::Dataset& ds) const {
    const auto c = dataio::read_checkpoint(ckpt(name));
    const auto split = parse_split_flag(o_.split);
    const auto pred = trainer::predict(c, ds, split);
    dataio::write_predictions(work_ / (name + ".pred.csv"), pred);
    std::vector<const dataio::UtteranceRecord*> truth;
    for (const auto& r : ds.records) {
      if (!split || r.split == *split) truth.push_back(&r);
    }
    if (truth.empty()) throw ValidationError("no records in split '" + o_.split + "'");
    return trainer::score_predictions(pred, truth);
  }

 private:
  static std::string fmt(double v) { return dataio::format_double(v); }

  const SweepOpts& o_;
  fs::path work_;
};

void finish_sweep(Env& env, const SweepOpts& o, const std::string& table, const std::string& csv, const json& details) {
  write_text(o.out, csv);
  const std::string json_path = o.out + ".json";
  write_text(json_path, details.dump(2) + "\n");
  env.out << csv;
  RunManifest m;
  for (const char* f : {dataio::kLabelsFile, dataio::kSpeechFile, dataio::kTextFile}) {
    if (fs::exists(fs::path(o.data) / f)) m.add_input(fs::path(o.data) / f);
  }
  m.config = {{"command", "sweep " + table}, {"lr1", o.lr1},         {"lr2", o.lr2},
              {"epochs1", o.epochs1},       {"epochs2", o.epochs2}, {"batch_size", o.batch_size},
              {"split", o.split},           {"text_supervision", o.text_supervision}};
  m.seed = o.seed;
  m.add_output(o.out);
  m.add_output(json_path);
  finish_manifest(env, m, o.out, o.manifest);
}

int exec_table1(const SweepOpts& o, Env& env) {
  if (o.text_supervision != "same" && o.text_supervision != "categorical" && o.text_supervision != "attributes") {
    throw ValidationError("--text-supervision: expected same|categorical|attributes");
  }
  const auto ds = dataio::load_dataset_dir(o.data);
  Sweep s(o);
  const std::vector<std::string> tasks{"categorical", "attributes"};
  auto text_task = [&](const std::string& task) { return o.text_supervision == "same" ? task : o.text_supervision; };

  std::vector<Job> first;
  for (const auto& t : tasks) {
    first.push_back(s.stage1("s1_speech_" + t, "speech", t));
    first.push_back(s.stage1("s1_text_pre_" + t, "text", t, {}, true));
  }
  for (const auto& t : tasks) {
    const std::string name = "s1_text_ft_" + text_task(t);
    if (std::none_of(first.begin(), first.end(), [&](const Job& j) { return j.name == name; })) {
      first.push_back(s.stage1(name, "text", text_task(t)));
    }
  }
  s.execute(first);

  struct Row {
    std::string method, speech1, speech2, text1, text2;
    std::string fusion, activation;
    bool text_ft;
  };
  const std::vector<Row> rows{
      {"Baseline", "yes", "N/A", "N/A", "N/A", "", "", false},
      {"Cross Attention", "yes", "no", "no", "no", "cross-attn", "relu", false},
      {"Concat", "yes", "no", "no", "no", "concat", "relu", false},
      {"Concat (Mish)", "yes", "no", "no", "no", "concat", "mish", false},
      {"Concat (Mish)", "yes", "no", "yes", "no", "concat", "mish", true},
  };
  auto s2_name = [](std::size_t i, const std::string& t) { return "s2_row" + std::to_string(i) + "_" + t; };
  std::vector<Job> second;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    for (const auto& t : tasks) {
      const std::string text = rows[i].text_ft ? "s1_text_ft_" + text_task(t) : "s1_text_pre_" + t;
      second.push_back(s.stage2(s2_name(i, t), "s1_speech_" + t, text, t, rows[i].fusion, rows[i].activation));
    }
  }
  s.execute(second);

  std::string csv =
      "Method,Speech Stage 1,Speech Stage 2,Text Stage 1,Text Stage 2,F1-Macro,F1-Micro,Acc.,Val.,Aro.,Dom.,Avg\n";
  json details = json::array();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto cat_name = i == 0 ? std::string("s1_speech_categorical") : s2_name(i, "categorical");
    const auto att_name = i == 0 ? std::string("s1_speech_attributes") : s2_name(i, "attributes");
    const auto cat = s.score(cat_name, ds);
    const auto att = s.score(att_name, ds);
    const auto merged = metrics::make_report(cat.classification, att.attributes);
    const auto& r = rows[i];
    csv += r.method + "," + r.speech1 + "," + r.speech2 + "," + r.text1 + "," + r.text2 + "," + merged.csv_row() + "\n";
    details.push_back({{"method", r.method},
                       {"fusion", r.fusion.empty() ? "none" : r.fusion},
                       {"activation", r.activation.empty() ? "mish" : r.activation},
                       {"text_fine_tuned", r.text_ft},
                       {"text_supervision", r.text_ft ? o.text_supervision : "none"},
                       {"categorical_checkpoint", s.ckpt(cat_name)},
                       {"attributes_checkpoint", s.ckpt(att_name)},
                       {"report", merged.to_json()}});
  }
  finish_sweep(env, o, "table1", csv, {{"table", "table1"}, {"split", o.split}, {"rows", details}});
  return 0;
}

int exec_table2(const SweepOpts& o, Env& env) {
  const auto ds = dataio::load_dataset_dir(o.data);
  Sweep s(o);
  struct Schema {
    std::string label, key;
    std::vector<std::string> flags;
  };
  const std::vector<Schema> schemas{
      {"WCE", "wce", {"--loss", "wce", "--sampler", "shuffled"}},
      {"Balanced Sample", "balanced", {"--loss", "ce", "--sampler", "balanced"}},
      {"Focal Loss", "focal", {"--loss", "focal", "--sampler", "shuffled"}},
  };
  std::vector<Job> first{s.stage1("s1_text_pre_categorical", "text", "categorical", {}, true)};
  for (const auto& sc : schemas) first.push_back(s.stage1("s1_speech_" + sc.key, "speech", "categorical", sc.flags));
  s.execute(first);
  std::vector<Job> second;
  for (const auto& sc : schemas) {
    second.push_back(s.stage2("s2_" + sc.key, "s1_speech_" + sc.key, "s1_text_pre_categorical", "categorical",
                              "concat", "mish", sc.flags));
  }
  s.execute(second);

  std::string csv = "Speech,Fine-tune,Schema,F1-Macro,F1-Micro,Acc.\n";
  json details = json::array();
  for (const auto& sc : schemas) {
    const auto rep = s.score("s2_" + sc.key, ds);
    const auto& c = rep.classification.value();
    csv += "speech,yes," + sc.label + "," + metrics::format3(c.f1_macro) + "," + metrics::format3(c.f1_micro) + "," +
           metrics::format3(c.accuracy) + "\n";
    details.push_back({{"schema", sc.label}, {"checkpoint", s.ckpt("s2_" + sc.key)}, {"report", rep.to_json()}});
  }
  finish_sweep(env, o, "table2", csv, {{"table", "table2"}, {"split", o.split}, {"rows", details}});
  return 0;
}

}  // namespace

void register_sweeps(CLI::App& app, Env& env, Registry& reg) {
  auto* sweep = app.add_subcommand("sweep", "Run an experiment grid and emit a table-shaped CSV");
  sweep->require_subcommand(1);
  auto common = [](CLI::App* sub, SweepOpts& o) {
    sub->add_option("--data", o.data, "Dataset directory")->required()->check(CLI::ExistingDirectory);
    sub->add_option("--work", o.work, "Directory for checkpoints, predictions and logs")->required();
    sub->add_option("--out", o.out, "Table CSV")->required();
    sub->add_option("--seed", o.seed, "Seed shared by every run")->required();
    sub->add_option("--lr1", o.lr1, "Stage-1 learning rate");
    sub->add_option("--lr2", o.lr2, "Stage-2 learning rate");
    sub->add_option("--epochs1", o.epochs1, "Stage-1 epochs");
    sub->add_option("--epochs2", o.epochs2, "Stage-2 epochs");
    sub->add_option("--batch-size", o.batch_size, "Batch size");
    sub->add_option("--split", o.split, "Split to report: train|dev|test1|all");
    sub->add_option("--parallel", o.parallel, "Training processes in flight (1 runs in-process)");
    sub->add_option("--exe", o.exe, "serlab executable for --parallel (default: this process)");
    sub->add_option("--manifest", o.manifest, "Where to write the run manifest (default: <out>.manifest.json)");
  };
  {
    auto o = std::make_shared<SweepOpts>();
    auto* sub = sweep->add_subcommand("table1", "Fusion strategies: baseline, cross-attention, concat, concat (Mish)");
    common(sub, *o);
    sub->add_option("--text-supervision", o->text_supervision,
                    "Task used to fine-tune the text encoder in the last row: same|categorical|attributes");
    reg.add(sub, [o, &env] { return exec_table1(*o, env); });
  }
  {
    auto o = std::make_shared<SweepOpts>();
    auto* sub = sweep->add_subcommand("table2", "Balancing schemes: WCE, balanced sampling, focal loss");
    common(sub, *o);
    reg.add(sub, [o, &env] { return exec_table2(*o, env); });
  }
}

}  // namespace serlab::cli
