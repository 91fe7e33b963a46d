#ifndef EACL_CLI_HPP_
#define EACL_CLI_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "eacl/config.hpp"
#include "eacl/metrics.hpp"
#include "eacl/pipeline.hpp"

namespace eacl {

// Command implementations behind the CLI; tests drive them directly.

struct TrainArtifacts {
  std::string checkpoint_init;
  std::string checkpoint_stage1;
  std::string checkpoint_final;
  std::string train_log;
  std::string eval_report;
  std::string embeddings;
  std::string manifest;
  EvalReport report;
};

TrainArtifacts cmd_train(const TrainConfig& config, const std::string& corpus_path,
                         const std::string& out_dir);

EvalReport cmd_eval(const std::string& checkpoint_path, const std::string& corpus_path);

struct AblateResult {
  std::vector<std::string> ablations;  // fixed row order
  std::vector<std::uint64_t> seeds;
  // weighted F1 and delta vs the "none" row, keyed by ablation name.
  std::map<std::string, std::vector<double>> f1;
  std::map<std::string, std::vector<double>> delta;
  std::map<std::string, double> median_f1;
  std::map<std::string, double> median_delta;
  std::string table_text;
};

AblateResult cmd_ablate(const TrainConfig& base_config, const std::string& corpus_path,
                        const std::string& out_dir, const std::vector<std::uint64_t>& seeds);

struct AnchorAnalysis {
  AnchorGeometry initial;
  AnchorGeometry final_;
  double min_angle_delta_deg = 0.0;
};

// init_path may be empty, in which case the final checkpoint doubles as
// the initial one (zero delta).
AnchorAnalysis cmd_analyze_anchors(const std::string& init_path,
                                   const std::string& final_path,
                                   const std::string& out_path);

void cmd_synth(std::size_t classes, std::size_t per_class,
               const std::vector<std::pair<int, int>>& similar_pairs, double noise,
               std::uint64_t seed, const std::string& out_path);

double median(std::vector<double> xs);

std::string corpus_fingerprint(const std::string& path);

}  // namespace eacl

#endif  // EACL_CLI_HPP_
