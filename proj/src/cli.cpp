#include "eacl/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "eacl/checkpoint.hpp"
#include "eacl/errors.hpp"
#include "eacl/rng.hpp"

namespace eacl {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string utc_now() {
  auto now = std::chrono::system_clock::now();
  std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json config_to_json(const TrainConfig& c) {
  json doc;
  doc["lambda1"] = c.lambda1;
  doc["lambda2"] = c.lambda2;
  doc["tau"] = c.tau;
  doc["k"] = c.k;
  doc["f"] = c.f;
  doc["d"] = c.d;
  doc["batch_size"] = c.batch_size;
  doc["stage1_epochs"] = c.stage1_epochs;
  doc["stage2_epochs"] = c.stage2_epochs;
  doc["learning_rate"] = c.learning_rate;
  doc["seed"] = c.seed;
  doc["supcon_variant"] = to_string(c.supcon_variant);
  doc["ablation"] = to_string(c.ablation);
  doc["dev_frac"] = c.dev_frac;
  doc["test_frac"] = c.test_frac;
  return doc;
}

json stats_to_json(const CorpusStats& s) {
  return json{{"dialogues", s.dialogues},
              {"utterances", s.utterances},
              {"class_counts", s.class_counts}};
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write file: " + path);
  out << text;
}

CheckpointMeta make_meta(const TrainConfig& config, const std::vector<EmotionLabel>& labels) {
  CheckpointMeta meta;
  meta.config_hash = config_hash(config);
  for (const auto& l : labels) meta.label_texts.push_back(l.text);
  meta.k = config.k;
  meta.feature_seed = derive_seed(config.seed, "features");
  meta.supcon_variant = config.supcon_variant;
  return meta;
}

}  // namespace

double median(std::vector<double> xs) {
  if (xs.empty()) throw ValidationError("median of empty list");
  std::sort(xs.begin(), xs.end());
  std::size_t n = xs.size();
  return n % 2 == 1 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

std::string corpus_fingerprint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open corpus file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  char hex[32];
  std::snprintf(hex, sizeof(hex), "fnv1a64:%016llx",
                static_cast<unsigned long long>(fnv1a64(buf.str())));
  return hex;
}

TrainArtifacts cmd_train(const TrainConfig& config, const std::string& corpus_path,
                         const std::string& out_dir) {
  validate_config(config);
  LoadedCorpus corpus = load_corpus(corpus_path);
  for (const auto& w : corpus.warnings) std::cerr << "warning: " << w << "\n";
  if (corpus.conversations.empty()) throw DataError("train: corpus is empty");

  fs::create_directories(out_dir);
  ExperimentResult result = run_experiment(config, corpus.conversations, corpus.labels);

  TrainArtifacts artifacts;
  artifacts.report = result.test_report;
  CheckpointMeta meta = make_meta(config, corpus.labels);
  auto path = [&](const char* name) { return (fs::path(out_dir) / name).string(); };

  artifacts.checkpoint_init = path("checkpoint_init.json");
  save_checkpoint({result.init_state, meta}, artifacts.checkpoint_init);
  artifacts.checkpoint_stage1 = path("checkpoint_stage1.json");
  save_checkpoint({result.stage1_state, meta}, artifacts.checkpoint_stage1);
  artifacts.checkpoint_final = path("checkpoint_final.json");
  save_checkpoint({result.final_state, meta}, artifacts.checkpoint_final);

  std::ostringstream log_text;
  for (const auto& rec : result.log) log_text << epoch_record_to_json(rec) << "\n";
  artifacts.train_log = path("trainlog.jsonl");
  write_text(artifacts.train_log, log_text.str());

  artifacts.eval_report = path("eval.json");
  write_text(artifacts.eval_report, eval_report_to_json(result.test_report) + "\n");

  artifacts.embeddings = path("embeddings.csv");
  const auto& eval_samples = result.samples.test.empty() ? result.samples.train
                                                         : result.samples.test;
  export_embeddings(result.final_state, eval_samples, artifacts.embeddings);

  json manifest;
  manifest["command"] = "train";
  manifest["created_at_utc"] = utc_now();
  manifest["config"] = config_to_json(config);
  manifest["config_hash"] = config_hash(config);
  manifest["corpus_path"] = corpus_path;
  manifest["corpus_fingerprint"] = corpus_fingerprint(corpus_path);
  manifest["seeds"] = std::vector<std::uint64_t>{config.seed};
  manifest["artifacts"] = {{"checkpoint_init", artifacts.checkpoint_init},
                           {"checkpoint_stage1", artifacts.checkpoint_stage1},
                           {"checkpoint_final", artifacts.checkpoint_final},
                           {"train_log", artifacts.train_log},
                           {"eval_report", artifacts.eval_report},
                           {"embeddings", artifacts.embeddings}};
  manifest["splits"] = {{"train", stats_to_json(result.train_stats)},
                        {"dev", stats_to_json(result.dev_stats)},
                        {"test", stats_to_json(result.test_stats)}};
  manifest["results"] = {{"test_weighted_f1", result.test_report.weighted_f1},
                         {"test_macro_f1", result.test_report.macro_f1}};
  artifacts.manifest = path("manifest.json");
  write_text(artifacts.manifest, manifest.dump(1) + "\n");
  return artifacts;
}

EvalReport cmd_eval(const std::string& checkpoint_path, const std::string& corpus_path) {
  Checkpoint ckpt = load_checkpoint(checkpoint_path);
  LoadedCorpus corpus = load_corpus(corpus_path);
  for (const auto& w : corpus.warnings) std::cerr << "warning: " << w << "\n";

  std::vector<std::string> corpus_labels;
  for (const auto& l : corpus.labels) corpus_labels.push_back(l.text);
  if (corpus_labels != ckpt.meta.label_texts) {
    std::ostringstream msg;
    msg << "eval: corpus label set [";
    for (std::size_t i = 0; i < corpus_labels.size(); ++i) {
      msg << (i ? "," : "") << corpus_labels[i];
    }
    msg << "] does not match checkpoint label set [";
    for (std::size_t i = 0; i < ckpt.meta.label_texts.size(); ++i) {
      msg << (i ? "," : "") << ckpt.meta.label_texts[i];
    }
    msg << "]";
    throw DataError(msg.str());
  }

  std::vector<EncodedSample> samples =
      make_samples(corpus.conversations, ckpt.meta.k, ckpt.state.feature_dim,
                   ckpt.meta.feature_seed);
  std::vector<int> pred = predict(ckpt.state, samples);
  return evaluate(sample_labels(samples), pred, ckpt.state.class_count);
}

AblateResult cmd_ablate(const TrainConfig& base_config, const std::string& corpus_path,
                        const std::string& out_dir, const std::vector<std::uint64_t>& seeds) {
  if (seeds.empty()) throw ValidationError("ablate: need at least one seed");
  validate_config(base_config);
  LoadedCorpus corpus = load_corpus(corpus_path);
  for (const auto& w : corpus.warnings) std::cerr << "warning: " << w << "\n";
  if (corpus.conversations.empty()) throw DataError("ablate: corpus is empty");

  AblateResult result;
  result.seeds = seeds;
  const Ablation grid[] = {Ablation::none,       Ablation::no_angle,
                           Ablation::no_ce,      Ablation::no_inherit,
                           Ablation::no_adapt,   Ablation::center_anchors};
  for (Ablation a : grid) result.ablations.push_back(to_string(a));

  for (Ablation a : grid) {
    for (std::uint64_t seed : seeds) {
      TrainConfig config = base_config;
      config.seed = seed;
      config.ablation = a;
      ExperimentResult run = run_experiment(config, corpus.conversations, corpus.labels);
      result.f1[to_string(a)].push_back(run.test_report.weighted_f1);
    }
  }
  for (Ablation a : grid) {
    const std::string name = to_string(a);
    for (std::size_t i = 0; i < seeds.size(); ++i) {
      result.delta[name].push_back(result.f1[name][i] - result.f1["none"][i]);
    }
    result.median_f1[name] = median(result.f1[name]);
    result.median_delta[name] = median(result.delta[name]);
  }

  std::ostringstream table;
  table << "ablation        ";
  for (std::uint64_t seed : seeds) table << "  seed" << seed;
  table << "  median  delta_vs_none\n";
  char buf[64];
  for (const auto& name : result.ablations) {
    std::snprintf(buf, sizeof(buf), "%-16s", name.c_str());
    table << buf;
    for (double x : result.f1[name]) {
      std::snprintf(buf, sizeof(buf), "  %.4f", x);
      table << buf;
    }
    std::snprintf(buf, sizeof(buf), "  %.4f  %+.4f\n", result.median_f1[name],
                  result.median_delta[name]);
    table << buf;
  }
  result.table_text = table.str();

  fs::create_directories(out_dir);
  json doc;
  doc["command"] = "ablate";
  doc["created_at_utc"] = utc_now();
  doc["config"] = config_to_json(base_config);
  doc["corpus_path"] = corpus_path;
  doc["corpus_fingerprint"] = corpus_fingerprint(corpus_path);
  doc["seeds"] = seeds;
  doc["ablations"] = result.ablations;
  doc["weighted_f1"] = result.f1;
  doc["delta_vs_none"] = result.delta;
  doc["median_f1"] = result.median_f1;
  doc["median_delta"] = result.median_delta;
  write_text((fs::path(out_dir) / "ablate.json").string(), doc.dump(1) + "\n");
  write_text((fs::path(out_dir) / "ablate.txt").string(), result.table_text);
  return result;
}

AnchorAnalysis cmd_analyze_anchors(const std::string& init_path,
                                   const std::string& final_path,
                                   const std::string& out_path) {
  Checkpoint final_ckpt = load_checkpoint(final_path);
  Checkpoint init_ckpt = init_path.empty() ? final_ckpt : load_checkpoint(init_path);

  AnchorAnalysis analysis;
  analysis.initial = anchor_geometry(current_anchors(init_ckpt.state));
  analysis.final_ = anchor_geometry(current_anchors(final_ckpt.state));
  analysis.min_angle_delta_deg = analysis.final_.min_angle_deg - analysis.initial.min_angle_deg;

  json doc;
  doc["initial"] = json::parse(anchor_geometry_to_json(analysis.initial));
  doc["final"] = json::parse(anchor_geometry_to_json(analysis.final_));
  doc["min_angle_delta_deg"] = analysis.min_angle_delta_deg;
  if (!out_path.empty()) write_text(out_path, doc.dump(1) + "\n");
  return analysis;
}

void cmd_synth(std::size_t classes, std::size_t per_class,
               const std::vector<std::pair<int, int>>& similar_pairs, double noise,
               std::uint64_t seed, const std::string& out_path) {
  SynthCorpus corpus = synth_corpus(classes, per_class, similar_pairs, noise, seed);
  save_corpus(corpus.conversations, corpus.labels, out_path);
}

}  // namespace eacl
