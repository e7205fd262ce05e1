#include "commands.hpp"

#include <cstdlib>
#include <iostream>
#include <sstream>

#include "serlab/common/error.hpp"
#include "serlab/dataio/binary_io.hpp"
#include "serlab/dataio/checkpoint.hpp"
#include "serlab/dataio/synthetic.hpp"
#include "serlab/llm/eval.hpp"
#include "serlab/llm/prompts.hpp"
#include "serlab/metrics/regression.hpp"
#include "serlab/metrics/report.hpp"
#include "serlab/trainer/predict.hpp"
#include "serlab/trainer/trainer.hpp"

namespace serlab::cli {

namespace fs = std::filesystem;
using nlohmann::json;

std::optional<dataio::Split> parse_split_flag(const std::string& value) {
  if (value == "all") return std::nullopt;
  return dataio::parse_split(value);
}

std::vector<const dataio::UtteranceRecord*> pointers(const std::vector<dataio::UtteranceRecord>& rows) {
  std::vector<const dataio::UtteranceRecord*> out;
  for (const auto& r : rows) out.push_back(&r);
  return out;
}

std::vector<dataio::UtteranceRecord> load_truth(const std::string& data_dir, const std::string& labels,
                                                std::optional<dataio::Split> split, RunManifest& manifest) {
  if (data_dir.empty() == labels.empty()) throw ValidationError("give exactly one of --data or --labels");
  const fs::path path = labels.empty() ? fs::path(data_dir) / dataio::kLabelsFile : fs::path(labels);
  manifest.add_input(path);
  std::vector<dataio::UtteranceRecord> rows;
  for (auto& r : dataio::read_labels(path)) {
    if (split && r.split != *split) continue;
    rows.push_back({r.id, r.split, {}, {}, r.emotion, r.attributes});
  }
  if (rows.empty()) throw ValidationError("no labelled rows in the selected split");
  return rows;
}

void write_text(const fs::path& path, const std::string& text) { dataio::write_file(path, text); }

void finish_manifest(Env& env, RunManifest& m, const fs::path& primary, const std::string& override_path) {
  for (const auto& c : env.config_files) m.add_input(c);
  m.args = env.args;
  m.cwd = fs::current_path().string();
  const fs::path path = override_path.empty() ? fs::path(primary.string() + ".manifest.json") : fs::path(override_path);
  m.write(path);
}

namespace {

std::vector<double> parse_doubles(const std::string& text, const std::string& flag) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(cell, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != cell.size()) throw ValidationError(flag + ": '" + cell + "' is not a number");
    out.push_back(v);
  }
  if (out.empty()) throw ValidationError(flag + ": empty list");
  return out;
}

CLI::App* add_manifest_flag(CLI::App* sub, std::string& target) {
  sub->add_option("--manifest", target, "Where to write the run manifest (default: <output>.manifest.json)");
  return sub;
}

// gen-synth --------------------------------------------------------------

struct GenSynthOpts {
  std::string out;
  std::uint64_t seed = 0;
  std::size_t per_class = 100;
  std::string counts;
  std::uint32_t speech_dim = 16;
  std::uint32_t text_dim = 16;
  std::uint32_t min_frames = 4;
  std::uint32_t max_frames = 12;
  double separation = 1.25;
  double noise = 0.25;
  double train_fraction = 0.70;
  double dev_fraction = 0.15;
  std::string labels = "both";
  std::vector<std::string> anchors;
  std::string manifest;
};

int exec_gen_synth(const GenSynthOpts& o, Env& env) {
  dataio::SynthConfig cfg;
  cfg.counts.fill(o.per_class);
  if (!o.counts.empty()) {
    auto c = parse_doubles(o.counts, "--counts");
    if (c.size() != 8) throw ValidationError("--counts: expected 8 comma-separated counts");
    for (std::size_t i = 0; i < 8; ++i) {
      if (c[i] < 0 || c[i] != static_cast<double>(static_cast<std::size_t>(c[i]))) {
        throw ValidationError("--counts: counts must be non-negative integers");
      }
      cfg.counts[i] = static_cast<std::size_t>(c[i]);
    }
  }
  cfg.speech_dim = o.speech_dim;
  cfg.text_dim = o.text_dim;
  cfg.min_frames = o.min_frames;
  cfg.max_frames = o.max_frames;
  cfg.separation = o.separation;
  cfg.noise = o.noise;
  cfg.train_fraction = o.train_fraction;
  cfg.dev_fraction = o.dev_fraction;
  cfg.seed = o.seed;
  if (o.labels == "categorical") {
    cfg.attributes = false;
  } else if (o.labels == "attributes") {
    cfg.emotions = false;
  } else if (o.labels != "both") {
    throw ValidationError("--labels: expected both|categorical|attributes");
  }
  for (const auto& a : o.anchors) {
    const auto eq = a.find('=');
    if (eq == std::string::npos) throw ValidationError("--anchor: expected CODE=arousal,valence,dominance");
    auto e = metrics::parse_emotion_code(a.substr(0, eq));
    if (!e) throw ValidationError("--anchor: unknown emotion code '" + a.substr(0, eq) + "'");
    auto v = parse_doubles(a.substr(eq + 1), "--anchor");
    if (v.size() != 3) throw ValidationError("--anchor: expected three values");
    cfg.anchors[metrics::index_of(*e)] = {v[0], v[1], v[2]};
  }
  cfg.validate();
  const auto ds = dataio::gen_synthetic(cfg);
  const auto files = dataio::save_dataset(o.out, ds);

  RunManifest m;
  json anchors = json::object();
  for (auto e : metrics::kAllEmotions) {
    const auto& a = cfg.anchors[metrics::index_of(e)];
    anchors[std::string(1, metrics::emotion_code(e))] = {a.arousal, a.valence, a.dominance};
  }
  m.config = {{"command", "gen-synth"}, {"counts", cfg.counts},         {"speech_dim", cfg.speech_dim},
              {"text_dim", cfg.text_dim}, {"min_frames", cfg.min_frames}, {"max_frames", cfg.max_frames},
              {"separation", cfg.separation}, {"noise", cfg.noise},     {"train_fraction", cfg.train_fraction},
              {"dev_fraction", cfg.dev_fraction}, {"labels", o.labels}, {"anchors", anchors}};
  m.seed = cfg.seed;
  for (const auto& f : files) m.add_output(f);
  finish_manifest(env, m, fs::path(o.out) / "dataset", o.manifest);
  env.out << "wrote " << ds.records.size() << " records to " << o.out << "\n";
  return 0;
}

void register_gen_synth(CLI::App& app, Env& env, Registry& reg) {
  auto o = std::make_shared<GenSynthOpts>();
  auto* sub = app.add_subcommand("gen-synth", "Generate a seeded synthetic dataset (speech.femb, text.femb, labels.csv)");
  sub->add_option("--out", o->out, "Output directory")->required();
  sub->add_option("--seed", o->seed, "Generator seed");
  sub->add_option("--per-class", o->per_class, "Samples per emotion class");
  sub->add_option("--counts", o->counts, "Eight comma-separated class counts (A,C,D,F,H,N,S,U); overrides --per-class");
  sub->add_option("--speech-dim", o->speech_dim, "Speech frame width");
  sub->add_option("--text-dim", o->text_dim, "Text token width");
  sub->add_option("--min-frames", o->min_frames, "Minimum frames per utterance");
  sub->add_option("--max-frames", o->max_frames, "Maximum frames per utterance");
  sub->add_option("--separation", o->separation, "Class-separation scale s");
  sub->add_option("--noise", o->noise, "Noise standard deviation");
  sub->add_option("--train-fraction", o->train_fraction, "Per-class share of the train split");
  sub->add_option("--dev-fraction", o->dev_fraction, "Per-class share of the dev split (rest is test1)");
  sub->add_option("--labels", o->labels, "Which labels to emit: both|categorical|attributes");
  sub->add_option("--anchor", o->anchors, "Attribute anchor override CODE=arousal,valence,dominance (repeatable)")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll)
      ->default_str("");
  add_manifest_flag(sub, o->manifest);
  reg.add(sub, [o, &env] { return exec_gen_synth(*o, env); });
}

// train-stage1 / train-stage2 ---------------------------------------------

struct TrainOpts {
  int stage = 1;
  std::string data;
  std::string out;
  std::string log;
  std::string manifest;
  std::string speech_ckpt;
  std::string text_ckpt;
  std::uint64_t seed = 0;
  std::string modality = "speech";
  std::string task = "categorical";
  std::string loss;
  std::string sampler = "shuffled";
  std::string fusion = "concat";
  std::string activation = "mish";
  std::size_t batch_size = trainer::kDefaultBatchSize;
  double lr = trainer::kStage1LearningRate;
  std::size_t epochs = trainer::kStage1Epochs;
  double gamma = 2.0;
  std::size_t hidden = 16;
  std::size_t attention_dim = 8;
  std::size_t embed = 16;
  std::size_t xattn_dim = 16;
};

trainer::TrainConfig to_config(const TrainOpts& o) {
  auto c = trainer::TrainConfig::defaults(o.stage);
  c.modality = model::parse_modality(o.modality);
  c.task = model::parse_task(o.task);
  if (!o.loss.empty()) c.loss = trainer::parse_loss(o.loss);
  c.sampler = trainer::parse_sampler(o.sampler);
  c.fusion = model::parse_fusion(o.fusion);
  c.activation = model::parse_activation(o.activation);
  c.batch_size = o.batch_size;
  c.learning_rate = o.lr;
  c.epochs = o.epochs;
  c.focal_gamma = o.gamma;
  c.hidden = o.hidden;
  c.attention_dim = o.attention_dim;
  c.embed = o.embed;
  c.xattn_dim = o.xattn_dim;
  c.seed = o.seed;
  c.validate();
  return c;
}

int exec_train(const TrainOpts& o, Env& env) {
  const auto cfg = to_config(o);
  RunManifest m;
  const auto ds = dataio::load_dataset_dir(o.data);
  for (const char* f : {dataio::kLabelsFile, dataio::kSpeechFile, dataio::kTextFile}) {
    if (fs::exists(fs::path(o.data) / f)) m.add_input(fs::path(o.data) / f);
  }
  trainer::TrainResult result;
  if (o.stage == 1) {
    result = trainer::train_stage1(cfg, ds);
  } else {
    const auto speech = dataio::read_checkpoint(o.speech_ckpt);
    const auto text = dataio::read_checkpoint(o.text_ckpt);
    m.add_input(o.speech_ckpt);
    m.add_input(o.text_ckpt);
    result = trainer::train_stage2(cfg, speech, text, ds);
  }
  dataio::write_checkpoint(o.out, result.checkpoint);
  std::string log;
  for (const auto& e : result.log) log += e.to_json().dump() + "\n";
  const fs::path log_path = o.log.empty() ? fs::path(o.out + ".log.jsonl") : fs::path(o.log);
  write_text(log_path, log);

  m.config = cfg.to_json();
  m.config["command"] = o.stage == 1 ? "train-stage1" : "train-stage2";
  m.seed = cfg.seed;
  m.add_output(o.out);
  m.add_output(log_path);
  finish_manifest(env, m, o.out, o.manifest);
  const auto& best = result.log[result.best_epoch];
  env.out << "stage " << o.stage << " checkpoint " << o.out << " (best epoch " << result.best_epoch
          << ", dev score " << metrics::format3(best.dev_score) << ")\n";
  return 0;
}

void add_train_common(CLI::App* sub, TrainOpts& o) {
  sub->add_option("--data", o.data, "Dataset directory")->required()->check(CLI::ExistingDirectory);
  sub->add_option("--out", o.out, "Checkpoint output path")->required();
  sub->add_option("--seed", o.seed, "Seed for initialization and batching")->required();
  sub->add_option("--task", o.task, "categorical|attributes");
  sub->add_option("--loss", o.loss, "ce|wce|focal|ccc|mse (default: focal for categorical, ccc for attributes)");
  sub->add_option("--sampler", o.sampler, "shuffled|balanced");
  sub->add_option("--activation", o.activation, "Head activation: mish|relu");
  sub->add_option("--batch-size", o.batch_size, "Batch size");
  sub->add_option("--lr", o.lr, "Adam learning rate");
  sub->add_option("--epochs", o.epochs, "Training epochs");
  sub->add_option("--gamma", o.gamma, "Focal loss gamma");
  sub->add_option("--log", o.log, "Per-epoch JSONL log (default: <out>.log.jsonl)");
  add_manifest_flag(sub, o.manifest);
}

void register_train(CLI::App& app, Env& env, Registry& reg) {
  {
    auto o = std::make_shared<TrainOpts>();
    auto* sub = app.add_subcommand("train-stage1", "Train one modality encoder and its task head");
    add_train_common(sub, *o);
    sub->add_option("--modality", o->modality, "speech|text");
    sub->add_option("--hidden", o->hidden, "Encoder frame width");
    sub->add_option("--attention-dim", o->attention_dim, "Attentive pooling width (speech)");
    sub->add_option("--embed", o->embed, "Encoder embedding width");
    reg.add(sub, [o, &env] { return exec_train(*o, env); });
  }
  {
    auto o = std::make_shared<TrainOpts>();
    o->stage = 2;
    o->lr = trainer::kStage2LearningRate;
    o->epochs = trainer::kStage2Epochs;
    auto* sub = app.add_subcommand("train-stage2", "Train a fusion head over two frozen stage-1 encoders");
    add_train_common(sub, *o);
    sub->add_option("--speech-ckpt", o->speech_ckpt, "Stage-1 speech checkpoint")->required()->check(CLI::ExistingFile);
    sub->add_option("--text-ckpt", o->text_ckpt, "Stage-1 text checkpoint")->required()->check(CLI::ExistingFile);
    sub->add_option("--fusion", o->fusion, "concat|cross-attn");
    sub->add_option("--xattn-dim", o->xattn_dim, "Cross-attention projection width");
    reg.add(sub, [o, &env] { return exec_train(*o, env); });
  }
}

// predict ------------------------------------------------------------------

struct PredictOpts {
  std::string ckpt;
  std::string data;
  std::string out;
  std::string split = "test1";
  std::string task;
  bool clamp = false;
  std::string manifest;
};

int exec_predict(const PredictOpts& o, Env& env) {
  const auto split = parse_split_flag(o.split);
  const auto ckpt = dataio::read_checkpoint(o.ckpt);
  const auto ds = dataio::load_dataset_dir(o.data);
  trainer::PredictOptions opts;
  opts.clamp = o.clamp;
  if (!o.task.empty()) opts.task = model::parse_task(o.task);
  const auto pred = trainer::predict(ckpt, ds, split, opts);
  if (pred.items.empty()) throw ValidationError("no records in the selected split");
  dataio::write_predictions(o.out, pred);

  RunManifest m;
  m.add_input(o.ckpt);
  for (const char* f : {dataio::kLabelsFile, dataio::kSpeechFile, dataio::kTextFile}) {
    if (fs::exists(fs::path(o.data) / f)) m.add_input(fs::path(o.data) / f);
  }
  m.config = {{"command", "predict"}, {"split", o.split}, {"clamp", o.clamp}};
  m.add_output(o.out);
  finish_manifest(env, m, o.out, o.manifest);
  env.out << "wrote " << pred.items.size() << " predictions to " << o.out << "\n";
  return 0;
}

void register_predict(CLI::App& app, Env& env, Registry& reg) {
  auto o = std::make_shared<PredictOpts>();
  auto* sub = app.add_subcommand("predict", "Run a checkpoint over a dataset split");
  sub->add_option("--ckpt", o->ckpt, "Checkpoint")->required()->check(CLI::ExistingFile);
  sub->add_option("--data", o->data, "Dataset directory")->required()->check(CLI::ExistingDirectory);
  sub->add_option("--out", o->out, "Predictions CSV")->required();
  sub->add_option("--split", o->split, "train|dev|test1|all");
  sub->add_option("--task", o->task, "Require the checkpoint to be trained for this task");
  sub->add_flag("--clamp", o->clamp, "Clamp attribute outputs to [1,7]");
  add_manifest_flag(sub, o->manifest);
  reg.add(sub, [o, &env] { return exec_predict(*o, env); });
}

// evaluate / llm score -------------------------------------------------------

struct EvalOpts {
  std::string pred;
  std::string data;
  std::string labels;
  std::string split = "test1";
  std::string failures;
  std::string out_csv;
  std::string out_json;
  std::string manifest;
};

int exec_evaluate(const EvalOpts& o, Env& env, const char* command) {
  RunManifest m;
  const auto truth = load_truth(o.data, o.labels, parse_split_flag(o.split), m);
  const auto pred = dataio::read_predictions(o.pred);
  m.add_input(o.pred);
  auto report = trainer::score_predictions(pred, pointers(truth));
  json j = report.to_json();
  if (!o.failures.empty()) {
    m.add_input(o.failures);
    auto f = json::parse(dataio::read_file(o.failures), nullptr, false);
    if (f.is_discarded() || !f.contains("failed")) throw ValidationError("--failures: not a failure report");
    j["llm_failures"] = f["failed"];
  }
  const std::string csv = std::string(metrics::kReportCsvHeader) + "\n" + report.csv_row() + "\n";
  env.out << csv;
  if (report.missing > 0) env.out << "missing predictions: " << report.missing << "\n";
  m.config = {{"command", command}, {"split", o.split}};
  if (!o.out_csv.empty()) {
    write_text(o.out_csv, csv);
    m.add_output(o.out_csv);
  }
  if (!o.out_json.empty()) {
    write_text(o.out_json, j.dump(2) + "\n");
    m.add_output(o.out_json);
  }
  if (!m.outputs.empty()) finish_manifest(env, m, o.out_csv.empty() ? o.out_json : o.out_csv, o.manifest);
  return 0;
}

void add_truth_flags(CLI::App* sub, std::string& data, std::string& labels, std::string& split) {
  sub->add_option("--data", data, "Dataset directory holding labels.csv")->check(CLI::ExistingDirectory);
  sub->add_option("--labels", labels, "Labels CSV")->check(CLI::ExistingFile);
  sub->add_option("--split", split, "train|dev|test1|all");
}

CLI::App* add_eval_flags(CLI::App* sub, EvalOpts& o) {
  sub->add_option("--pred", o.pred, "Predictions CSV")->required()->check(CLI::ExistingFile);
  add_truth_flags(sub, o.data, o.labels, o.split);
  sub->add_option("--out-csv", o.out_csv, "Report CSV (Table 1 column order)");
  sub->add_option("--out-json", o.out_json, "Report JSON");
  add_manifest_flag(sub, o.manifest);
  return sub;
}

void register_evaluate(CLI::App& app, Env& env, Registry& reg) {
  auto o = std::make_shared<EvalOpts>();
  auto* sub = app.add_subcommand("evaluate", "Score predictions against labels");
  add_eval_flags(sub, *o);
  reg.add(sub, [o, &env] { return exec_evaluate(*o, env, "evaluate"); });
}

// analyze ---------------------------------------------------------------------

struct AnalyzeOpts {
  std::string pred;
  std::string pred_b;
  std::string data;
  std::string labels;
  std::string split = "test1";
  std::string attribute = "valence";
  std::string edges = "1,3,5,7";
  std::string out;
  std::string out_json;
  std::string manifest;
};

struct Paired {
  std::vector<double> a;
  std::vector<double> b;
  std::vector<double> truth;
  std::vector<metrics::Emotion> emotions;
};

Paired pair_attribute(const std::vector<dataio::UtteranceRecord>& truth, const dataio::PredictionSet& a,
                      const dataio::PredictionSet* b, metrics::Attribute attr, bool need_emotion) {
  std::map<std::string, const dataio::Prediction*> pa, pb;
  for (const auto& p : a.items) pa[p.id] = &p;
  if (b) {
    for (const auto& p : b->items) pb[p.id] = &p;
  }
  Paired out;
  for (const auto& r : truth) {
    if (!r.attributes) continue;
    auto ia = pa.find(r.id);
    if (ia == pa.end() || !ia->second->attributes) continue;
    const dataio::Prediction* q = nullptr;
    if (b) {
      auto ib = pb.find(r.id);
      if (ib == pb.end() || !ib->second->attributes) continue;
      q = ib->second;
    }
    if (need_emotion && !r.emotion) continue;
    out.a.push_back(metrics::attribute_value(*ia->second->attributes, attr));
    if (q) out.b.push_back(metrics::attribute_value(*q->attributes, attr));
    out.truth.push_back(metrics::attribute_value(*r.attributes, attr));
    if (r.emotion) out.emotions.push_back(*r.emotion);
  }
  if (out.truth.empty()) throw ValidationError("no rows with both predicted and true attributes");
  return out;
}

void emit(Env& env, RunManifest& m, const AnalyzeOpts& o, const std::string& csv, const json& j) {
  env.out << csv;
  if (!o.out.empty()) {
    write_text(o.out, csv);
    m.add_output(o.out);
  }
  if (!o.out_json.empty()) {
    write_text(o.out_json, j.dump(2) + "\n");
    m.add_output(o.out_json);
  }
  if (!m.outputs.empty()) finish_manifest(env, m, o.out.empty() ? o.out_json : o.out, o.manifest);
}

int exec_bins(const AnalyzeOpts& o, Env& env) {
  RunManifest m;
  const auto attr = metrics::parse_attribute(o.attribute);
  const auto edges = parse_doubles(o.edges, "--edges");
  const auto truth = load_truth(o.data, o.labels, parse_split_flag(o.split), m);
  const auto pred = dataio::read_predictions(o.pred);
  m.add_input(o.pred);
  const auto p = pair_attribute(truth, pred, nullptr, attr, false);
  const auto bins = metrics::binned_ccc(p.a, p.truth, edges);
  std::string csv = "Bin,Count,CCC,Status\n";
  json rows = json::array();
  for (const auto& b : bins) {
    csv += "\"" + b.label() + "\"," + std::to_string(b.count) + "," + (b.ccc ? metrics::format3(*b.ccc) : "") + "," +
           b.status + "\n";
    rows.push_back({{"bin", b.label()},
                    {"lo", b.lo},
                    {"hi", b.hi},
                    {"closed_hi", b.closed_hi},
                    {"count", b.count},
                    {"ccc", b.ccc ? json(*b.ccc) : json(nullptr)},
                    {"status", b.status}});
  }
  m.config = {{"command", "analyze bins"}, {"attribute", o.attribute}, {"edges", edges}, {"split", o.split}};
  emit(env, m, o, csv, {{"attribute", o.attribute}, {"bins", rows}});
  return 0;
}

int exec_stats(const AnalyzeOpts& o, Env& env) {
  RunManifest m;
  const auto attr = metrics::parse_attribute(o.attribute);
  const auto truth = load_truth(o.data, o.labels, parse_split_flag(o.split), m);
  const auto pred = dataio::read_predictions(o.pred);
  m.add_input(o.pred);
  const auto p = pair_attribute(truth, pred, nullptr, attr, false);
  const auto sp = metrics::prediction_stats(p.a);
  const auto st = metrics::prediction_stats(p.truth);
  const std::string csv = "Series,Mean,Std,Formatted\nprediction," + dataio::format_double(sp.mean) + "," +
                          dataio::format_double(sp.std) + "," + sp.format() + "\nground truth," +
                          dataio::format_double(st.mean) + "," + dataio::format_double(st.std) + "," + st.format() +
                          "\n";
  m.config = {{"command", "analyze stats"}, {"attribute", o.attribute}, {"split", o.split}};
  emit(env, m, o, csv,
       {{"attribute", o.attribute},
        {"count", p.a.size()},
        {"prediction", {{"mean", sp.mean}, {"std", sp.std}, {"formatted", sp.format()}}},
        {"truth", {{"mean", st.mean}, {"std", st.std}, {"formatted", st.format()}}}});
  return 0;
}

int exec_compare(const AnalyzeOpts& o, Env& env) {
  RunManifest m;
  const auto attr = metrics::parse_attribute(o.attribute);
  const auto truth = load_truth(o.data, o.labels, parse_split_flag(o.split), m);
  const auto a = dataio::read_predictions(o.pred);
  const auto b = dataio::read_predictions(o.pred_b);
  m.add_input(o.pred);
  m.add_input(o.pred_b);
  const auto p = pair_attribute(truth, a, &b, attr, true);
  const auto cmp = metrics::compare_models(p.a, p.b, p.truth, p.emotions);
  std::string csv = "Emotion,Improved,Improved Share,All,All Share\n";
  json rows = json::array();
  for (auto e : metrics::kAllEmotions) {
    const auto i = metrics::index_of(e);
    csv += std::string(metrics::emotion_name(e)) + "," + std::to_string(cmp.improved_counts[i]) + "," +
           metrics::format3(cmp.improved_shares[i]) + "," + std::to_string(cmp.full_counts[i]) + "," +
           metrics::format3(cmp.full_shares[i]) + "\n";
    rows.push_back({{"emotion", std::string(1, metrics::emotion_code(e))},
                    {"improved", cmp.improved_counts[i]},
                    {"improved_share", cmp.improved_shares[i]},
                    {"all", cmp.full_counts[i]},
                    {"all_share", cmp.full_shares[i]}});
  }
  m.config = {{"command", "analyze compare"}, {"attribute", o.attribute}, {"split", o.split}};
  emit(env, m, o, csv,
       {{"attribute", o.attribute},
        {"samples", p.truth.size()},
        {"improved", cmp.improved.size()},
        {"ties", cmp.ties},
        {"emotions", rows}});
  return 0;
}

void register_analyze(CLI::App& app, Env& env, Registry& reg) {
  auto* analyze = app.add_subcommand("analyze", "Prediction analyses");
  analyze->require_subcommand(1);
  auto common = [](CLI::App* sub, AnalyzeOpts& o) {
    add_truth_flags(sub, o.data, o.labels, o.split);
    sub->add_option("--attribute", o.attribute, "arousal|valence|dominance");
    sub->add_option("--out", o.out, "CSV output");
    sub->add_option("--out-json", o.out_json, "JSON output");
    add_manifest_flag(sub, o.manifest);
  };
  {
    auto o = std::make_shared<AnalyzeOpts>();
    auto* sub = analyze->add_subcommand("bins", "CCC within ground-truth ranges");
    sub->add_option("--pred", o->pred, "Predictions CSV")->required()->check(CLI::ExistingFile);
    sub->add_option("--edges", o->edges, "Comma-separated bin edges; the last bin is closed");
    common(sub, *o);
    reg.add(sub, [o, &env] { return exec_bins(*o, env); });
  }
  {
    auto o = std::make_shared<AnalyzeOpts>();
    auto* sub = analyze->add_subcommand("stats", "Mean and population std of predictions and ground truth");
    sub->add_option("--pred", o->pred, "Predictions CSV")->required()->check(CLI::ExistingFile);
    common(sub, *o);
    reg.add(sub, [o, &env] { return exec_stats(*o, env); });
  }
  {
    auto o = std::make_shared<AnalyzeOpts>();
    auto* sub = analyze->add_subcommand("compare", "Emotion mix of samples where model A has lower squared error");
    sub->add_option("--pred-a", o->pred, "Predictions of model A")->required()->check(CLI::ExistingFile);
    sub->add_option("--pred-b", o->pred_b, "Predictions of model B")->required()->check(CLI::ExistingFile);
    common(sub, *o);
    reg.add(sub, [o, &env] { return exec_compare(*o, env); });
  }
}

// llm -------------------------------------------------------------------------

struct LlmPromptOpts {
  std::string task = "categorical";
  std::string transcript;
  std::string transcripts;
  std::string id;
  std::string out;
};

int exec_llm_prompt(const LlmPromptOpts& o, Env& env) {
  const auto task = model::parse_task(o.task);
  std::string transcript = o.transcript;
  if (!o.transcripts.empty()) {
    if (o.id.empty()) throw ValidationError("--transcripts needs --id");
    bool found = false;
    for (const auto& it : llm::read_transcripts(o.transcripts)) {
      if (it.id == o.id) {
        transcript = it.transcript;
        found = true;
        break;
      }
    }
    if (!found) throw ValidationError("--id: '" + o.id + "' not found in transcripts");
  }
  const auto prompt = llm::build_prompt(task, transcript);
  if (o.out.empty()) {
    env.out << prompt;
  } else {
    write_text(o.out, prompt);
  }
  return 0;
}

struct LlmRunOpts {
  std::string transcripts;
  std::string task = "categorical";
  std::string base_url;
  std::string model;
  std::string cache;
  std::size_t parallel = 4;
  double timeout = 60.0;
  int retries = 2;
  std::string api_key_env;
  std::string out;
  std::string failures;
  std::string manifest;
};

int exec_llm_run(const LlmRunOpts& o, Env& env) {
  llm::LlmEndpointConfig cfg;
  cfg.base_url = o.base_url;
  cfg.model = o.model;
  cfg.cache_path = o.cache;
  cfg.parallelism = o.parallel;
  cfg.timeout_seconds = o.timeout;
  cfg.max_retries = o.retries;
  if (!o.api_key_env.empty()) {
    const char* key = std::getenv(o.api_key_env.c_str());
    if (!key) throw ValidationError("--api-key-env: variable '" + o.api_key_env + "' is not set");
    cfg.api_key = key;
  }
  const auto task = model::parse_task(o.task);
  const auto items = llm::read_transcripts(o.transcripts);
  const auto result = llm::run_llm_eval(cfg, task, items);
  dataio::write_predictions(o.out, result.predictions);
  const fs::path failures = o.failures.empty() ? fs::path(o.out + ".failures.json") : fs::path(o.failures);
  write_text(failures, result.failure_report().dump(2) + "\n");

  RunManifest m;
  m.add_input(o.transcripts);
  m.config = {{"command", "llm run"},
              {"task", o.task},
              {"base_url", o.base_url},
              {"model", o.model},
              {"temperature", 0},
              {"cache", o.cache}};
  m.add_output(o.out);
  finish_manifest(env, m, o.out, o.manifest);
  env.out << "parsed " << result.predictions.items.size() << ", failed " << result.failures.size()
          << ", network calls " << result.network_calls << ", cache hits " << result.cache_hits << "\n";
  return 0;
}

void register_llm(CLI::App& app, Env& env, Registry& reg) {
  auto* llm_app = app.add_subcommand("llm", "Zero-shot LLM prompting protocol");
  llm_app->require_subcommand(1);
  {
    auto o = std::make_shared<LlmPromptOpts>();
    auto* sub = llm_app->add_subcommand("prompt", "Print the prompt for one transcript");
    sub->add_option("--task", o->task, "categorical|attributes");
    sub->add_option("--transcript", o->transcript, "Transcript text");
    sub->add_option("--transcripts", o->transcripts, "JSONL of {id, transcript}")->check(CLI::ExistingFile);
    sub->add_option("--id", o->id, "Transcript id to render from --transcripts");
    sub->add_option("--out", o->out, "Write the prompt here instead of stdout");
    reg.add(sub, [o, &env] { return exec_llm_prompt(*o, env); });
  }
  {
    auto o = std::make_shared<LlmRunOpts>();
    auto* sub = llm_app->add_subcommand("run", "Query a chat-completion endpoint for every transcript");
    sub->add_option("--transcripts", o->transcripts, "JSONL of {id, transcript}")->required()->check(CLI::ExistingFile);
    sub->add_option("--task", o->task, "categorical|attributes");
    sub->add_option("--base-url", o->base_url, "Endpoint base URL, e.g. http://localhost:8000/v1")->required();
    sub->add_option("--model", o->model, "Model name sent with each request")->required();
    sub->add_option("--cache", o->cache, "JSONL response cache")->required();
    sub->add_option("--parallel", o->parallel, "Requests in flight");
    sub->add_option("--timeout", o->timeout, "Per-request timeout in seconds");
    sub->add_option("--retries", o->retries, "Retries after transport errors, 429 and 5xx");
    sub->add_option("--api-key-env", o->api_key_env, "Environment variable holding a bearer token");
    sub->add_option("--out", o->out, "Predictions CSV")->required();
    sub->add_option("--failures", o->failures, "Failure report JSON (default: <out>.failures.json)");
    add_manifest_flag(sub, o->manifest);
    reg.add(sub, [o, &env] { return exec_llm_run(*o, env); });
  }
  {
    auto o = std::make_shared<EvalOpts>();
    auto* sub = llm_app->add_subcommand("score", "Score LLM predictions; unparsed ids are counted, not imputed");
    add_eval_flags(sub, *o);
    sub->add_option("--failures", o->failures, "Failure report written by llm run")->check(CLI::ExistingFile);
    reg.add(sub, [o, &env] { return exec_evaluate(*o, env, "llm score"); });
  }
}

}  // namespace

void register_commands(CLI::App& app, Env& env, Registry& reg) {
  register_gen_synth(app, env, reg);
  register_train(app, env, reg);
  register_predict(app, env, reg);
  register_evaluate(app, env, reg);
  register_analyze(app, env, reg);
  register_llm(app, env, reg);
}

}  // namespace serlab::cli
