#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "serlab/cli/config_file.hpp"
#include "serlab/cli/dispatch.hpp"
#include "serlab/cli/manifest.hpp"
#include "serlab/common/hash.hpp"
#include "serlab/dataio/binary_io.hpp"
#include "serlab/dataio/labels.hpp"
#include "test_util.hpp"

using namespace serlab;
using serlab::testing::TempDir;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result exec_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> v;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) v.push_back(l);
  return v;
}

void small_dataset(const TempDir& dir, const std::string& name = "data") {
  auto r = exec_cli({"gen-synth", "--out", dir.str(name), "--seed", "4", "--per-class", "16", "--speech-dim", "6",
                "--text-dim", "5", "--min-frames", "2", "--max-frames", "4"});
  ASSERT_EQ(r.code, 0) << r.err;
}

std::vector<std::string> small_model_flags() {
  return {"--hidden", "5", "--attention-dim", "3", "--embed", "4", "--lr", "5e-3", "--epochs", "2", "--batch-size", "16"};
}

void labels_as_predictions(const std::filesystem::path& labels, const std::filesystem::path& out, dataio::Split split) {
  dataio::PredictionSet set;
  for (const auto& row : dataio::read_labels(labels)) {
    if (row.split == split) set.items.push_back({row.id, row.emotion, row.attributes});
  }
  dataio::write_predictions(out, set);
}

}  // namespace

TEST(Cli, HelpAndUsage) {
  EXPECT_EQ(exec_cli({"--help"}).code, 0);
  EXPECT_EQ(exec_cli({}).code, 1);
  auto unknown = exec_cli({"gen-synth", "--out", "x", "--bogus-flag", "1"});
  EXPECT_EQ(unknown.code, 1);
  EXPECT_NE(unknown.err.find("--bogus-flag"), std::string::npos) << unknown.err;
  EXPECT_EQ(exec_cli({"frobnicate"}).code, 1);
}

TEST(Cli, HelpListsPaperDefaults) {
  auto s1 = exec_cli({"train-stage1", "--help"});
  EXPECT_EQ(s1.code, 0);
  for (const char* want : {"--lr FLOAT [1e-05]", "--epochs UINT [20]", "--batch-size UINT [32]", "--seed", "--modality",
                           "--loss", "--sampler", "--activation", "--task"}) {
    EXPECT_NE(s1.out.find(want), std::string::npos) << want << "\n" << s1.out;
  }
  auto s2 = exec_cli({"train-stage2", "--help"});
  for (const char* want : {"--lr FLOAT [5e-06]", "--epochs UINT [5]", "--batch-size UINT [32]", "--fusion TEXT [concat]",
                           "--activation TEXT [mish]", "--speech-ckpt", "--text-ckpt"}) {
    EXPECT_NE(s2.out.find(want), std::string::npos) << want << "\n" << s2.out;
  }
  for (std::vector<std::string> sub :
       {std::vector<std::string>{"gen-synth"}, {"predict"}, {"evaluate"}, {"analyze", "bins"}, {"analyze", "stats"},
        {"analyze", "compare"}, {"llm", "prompt"}, {"llm", "run"}, {"llm", "score"}, {"sweep", "table1"},
        {"sweep", "table2"}, {"replay"}}) {
    sub.push_back("--help");
    EXPECT_EQ(exec_cli(sub).code, 0) << sub[0];
  }
}

TEST(Cli, TrainRequiresSeed) {
  TempDir dir("cli_seed");
  small_dataset(dir);
  auto r = exec_cli({"train-stage1", "--data", dir.str("data"), "--out", dir.str("m.fckp")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("--seed"), std::string::npos) << r.err;
  auto bad = exec_cli({"train-stage1", "--data", dir.str("data"), "--out", dir.str("m.fckp"), "--seed", "1", "--task",
                  "attributes", "--loss", "wce"});
  EXPECT_EQ(bad.code, 1);
  auto missing = exec_cli({"train-stage1", "--data", dir.str("nothing"), "--out", dir.str("m.fckp"), "--seed", "1"});
  EXPECT_EQ(missing.code, 1);
}

TEST(Cli, EvaluatePerfectPredictions) {
  TempDir dir("cli_eval");
  small_dataset(dir);
  labels_as_predictions(dir / "data/labels.csv", dir / "pred.csv", dataio::Split::kTest1);
  auto r = exec_cli({"evaluate", "--pred", dir.str("pred.csv"), "--data", dir.str("data"), "--out-csv", dir.str("r.csv"),
                "--out-json", dir.str("r.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  auto l = lines(r.out);
  ASSERT_GE(l.size(), 2u);
  EXPECT_EQ(l[0], "F1-Macro,F1-Micro,Acc.,Val.,Aro.,Dom.,Avg");
  EXPECT_EQ(l[1], "1.000,1.000,1.000,1.000,1.000,1.000,1.000");
  EXPECT_EQ(dataio::read_file(dir / "r.csv"), l[0] + "\n" + l[1] + "\n");
  EXPECT_TRUE(std::filesystem::exists(dir / "r.csv.manifest.json"));
}

TEST(Cli, AnalyzeBinsStatsCompare) {
  TempDir dir("cli_an");
  small_dataset(dir);
  labels_as_predictions(dir / "data/labels.csv", dir / "pred.csv", dataio::Split::kTrain);
  auto bins = exec_cli({"analyze", "bins", "--pred", dir.str("pred.csv"), "--data", dir.str("data"), "--split", "train",
                   "--edges", "1,3,5,7"});
  ASSERT_EQ(bins.code, 0) << bins.err;
  auto l = lines(bins.out);
  ASSERT_EQ(l.size(), 4u) << bins.out;
  EXPECT_EQ(l[0], "Bin,Count,CCC,Status");
  EXPECT_EQ(l[1].rfind("\"[1, 3)\",", 0), 0u);
  EXPECT_EQ(l[3].rfind("\"[5, 7]\",", 0), 0u);
  auto stats = exec_cli({"analyze", "stats", "--pred", dir.str("pred.csv"), "--data", dir.str("data"), "--split", "train"});
  ASSERT_EQ(stats.code, 0) << stats.err;
  EXPECT_NE(stats.out.find("Series,Mean,Std,Formatted"), std::string::npos);
  auto cmp = exec_cli({"analyze", "compare", "--pred-a", dir.str("pred.csv"), "--pred-b", dir.str("pred.csv"), "--data",
                  dir.str("data"), "--split", "train"});
  ASSERT_EQ(cmp.code, 0) << cmp.err;
  EXPECT_EQ(lines(cmp.out).size(), 9u) << cmp.out;
  EXPECT_EQ(exec_cli({"analyze", "bins", "--pred", dir.str("pred.csv"), "--data", dir.str("data"), "--edges", "3,1"}).code, 1);
}

TEST(Cli, ConfigFileWithCommandLineOverride) {
  TempDir dir("cli_cfg");
  {
    std::ofstream out(dir / "synth.cfg");
    out << "# synthetic data\nper-class = 5\nseed = 3\n\nspeech-dim = 4\n";
  }
  auto args = cli::expand_config({"gen-synth", "--config", dir.str("synth.cfg"), "--per-class", "6"}, 1);
  EXPECT_EQ(args[1], "--per-class=5");
  EXPECT_EQ(args.back(), "6");
  auto r = exec_cli({"gen-synth", "--config", dir.str("synth.cfg"), "--out", dir.str("d"), "--per-class", "6"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(dataio::read_labels(dir / "d/labels.csv").size(), 48u);
  auto manifest = cli::RunManifest::read(dir / "d/dataset.manifest.json");
  EXPECT_EQ(manifest.seed, 3u);
  EXPECT_EQ(exec_cli({"gen-synth", "--config", dir.str("none.cfg"), "--out", dir.str("e")}).code, 1);
}

TEST(Cli, PipelineAndReplay) {
  TempDir dir("cli_pipe");
  small_dataset(dir);
  auto flags = small_model_flags();
  std::vector<std::string> s1{"train-stage1", "--data", dir.str("data"), "--out", dir.str("speech.fckp"), "--seed",
                              "1", "--modality", "speech"};
  s1.insert(s1.end(), flags.begin(), flags.end());
  ASSERT_EQ(exec_cli(s1).code, 0);
  std::vector<std::string> t1{"train-stage1", "--data", dir.str("data"), "--out", dir.str("text.fckp"), "--seed", "1",
                              "--modality", "text"};
  t1.insert(t1.end(), flags.begin(), flags.end());
  ASSERT_EQ(exec_cli(t1).code, 0);
  auto s2 = exec_cli({"train-stage2", "--data", dir.str("data"), "--out", dir.str("fused.fckp"), "--seed", "2",
                 "--speech-ckpt", dir.str("speech.fckp"), "--text-ckpt", dir.str("text.fckp"), "--fusion", "cross-attn",
                 "--lr", "0.01", "--epochs", "2", "--batch-size", "16", "--xattn-dim", "4"});
  ASSERT_EQ(s2.code, 0) << s2.err;
  auto pred = exec_cli({"predict", "--ckpt", dir.str("fused.fckp"), "--data", dir.str("data"), "--out", dir.str("p.csv")});
  ASSERT_EQ(pred.code, 0) << pred.err;
  auto ev = exec_cli({"evaluate", "--pred", dir.str("p.csv"), "--data", dir.str("data"), "--out-json", dir.str("r.json")});
  ASSERT_EQ(ev.code, 0) << ev.err;
  EXPECT_EQ(lines(ev.out).size(), 2u);

  std::string before = sha256_file(dir / "fused.fckp");
  auto rep = exec_cli({"replay", "--manifest", dir.str("fused.fckp.manifest.json")});
  EXPECT_EQ(rep.code, 0) << rep.err;
  EXPECT_EQ(sha256_file(dir / "fused.fckp"), before);
  EXPECT_EQ(exec_cli({"replay", "--manifest", dir.str("p.csv.manifest.json")}).code, 0);

  auto m = cli::RunManifest::read(dir / "fused.fckp.manifest.json");
  m.outputs.begin()->second = std::string(64, '0');
  m.write(dir / "tampered.json");
  EXPECT_EQ(exec_cli({"replay", "--manifest", dir.str("tampered.json")}).code, 2);

  std::ofstream(dir / "text.fckp", std::ios::app) << "x";
  EXPECT_EQ(exec_cli({"replay", "--manifest", dir.str("fused.fckp.manifest.json")}).code, 1);
  EXPECT_EQ(exec_cli({"predict", "--ckpt", dir.str("text.fckp"), "--data", dir.str("data"), "--out", dir.str("q.csv")}).code, 1);
}

TEST(Cli, LlmPrompt) {
  auto r = exec_cli({"llm", "prompt", "--task", "categorical", "--transcript", "I can't believe it!"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, dataio::read_file(std::string(SERLAB_GOLDEN_DIR) + "/categorical_prompt.txt"));
  EXPECT_EQ(exec_cli({"llm", "prompt", "--task", "attributes", "--transcript", ""}).code, 1);
}

TEST(Cli, SweepTable2Parallel) {
  TempDir dir("cli_sweep");
  small_dataset(dir);
  auto r = exec_cli({"sweep", "table2", "--data", dir.str("data"), "--work", dir.str("work"), "--out", dir.str("t2.csv"),
                "--seed", "3", "--lr1", "5e-3", "--lr2", "0.01", "--epochs1", "1", "--epochs2", "1", "--batch-size", "16",
                "--parallel", "2", "--exe", SERLAB_EXE});
  ASSERT_EQ(r.code, 0) << r.err << r.out;
  auto l = lines(dataio::read_file(dir / "t2.csv"));
  ASSERT_EQ(l.size(), 4u);
  EXPECT_EQ(l[0], "Speech,Fine-tune,Schema,F1-Macro,F1-Micro,Acc.");
  EXPECT_NE(l[1].find(",WCE,"), std::string::npos);
  EXPECT_NE(l[2].find(",Balanced Sample,"), std::string::npos);
  EXPECT_NE(l[3].find(",Focal Loss,"), std::string::npos);
  auto cols = [](const std::string& s) { return std::count(s.begin(), s.end(), ','); };
  for (const auto& row : l) EXPECT_EQ(cols(row), cols(l[0]));
}
