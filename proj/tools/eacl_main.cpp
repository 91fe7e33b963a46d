#include <cstdint>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "eacl/cli.hpp"
#include "eacl/errors.hpp"

namespace {

std::vector<std::pair<int, int>> parse_pairs(const std::vector<std::string>& specs) {
  std::vector<std::pair<int, int>> pairs;
  for (const auto& spec : specs) {
    std::size_t start = 0;
    while (start <= spec.size()) {
      std::size_t comma = spec.find(',', start);
      std::string item = spec.substr(start, comma == std::string::npos ? std::string::npos
                                                                       : comma - start);
      if (!item.empty()) {
        std::size_t colon = item.find(':');
        if (colon == std::string::npos) {
          throw eacl::ValidationError("--similar expects id:id, got \"" + item + "\"");
        }
        try {
          pairs.emplace_back(std::stoi(item.substr(0, colon)), std::stoi(item.substr(colon + 1)));
        } catch (const std::exception&) {
          throw eacl::ValidationError("--similar expects id:id, got \"" + item + "\"");
        }
      }
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
  }
  return pairs;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"emotion-anchored contrastive learning trainer"};
  app.require_subcommand(1);

  std::string config_path, corpus_path, out_dir, checkpoint_path;
  std::string init_ckpt, final_ckpt, out_path;
  std::vector<std::uint64_t> seeds;
  std::size_t classes = 4, per_class = 50;
  std::vector<std::string> similar_specs;
  double noise = 0.4;
  std::uint64_t seed = 7;

  auto* train = app.add_subcommand("train", "two-stage training run");
  train->add_option("--config", config_path, "config file")->required();
  train->add_option("--corpus", corpus_path, "corpus JSONL")->required();
  train->add_option("--out", out_dir, "output directory")->required();

  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint on a corpus");
  eval->add_option("--checkpoint", checkpoint_path, "checkpoint file")->required();
  eval->add_option("--corpus", corpus_path, "corpus JSONL")->required();

  auto* ablate = app.add_subcommand("ablate", "run the ablation grid");
  ablate->add_option("--config", config_path, "config file")->required();
  ablate->add_option("--corpus", corpus_path, "corpus JSONL")->required();
  ablate->add_option("--out", out_dir, "output directory")->required();
  ablate->add_option("--seeds", seeds, "seed list")->required()->delimiter(',');

  auto* analyze = app.add_subcommand("analyze-anchors", "anchor geometry before/after");
  analyze->add_option("--init", init_ckpt, "initial checkpoint (optional)");
  analyze->add_option("--final", final_ckpt, "final checkpoint")->required();
  analyze->add_option("--out", out_path, "output JSON")->required();

  auto* synth = app.add_subcommand("synth", "generate a synthetic corpus");
  synth->add_option("--classes", classes, "number of classes");
  synth->add_option("--per-class", per_class, "utterances per class");
  synth->add_option("--similar", similar_specs, "similar class pairs, id:id");
  synth->add_option("--noise", noise, "vocabulary noise in [0,1)");
  synth->add_option("--seed", seed, "generator seed");
  synth->add_option("--out", out_path, "output JSONL")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*train) {
      eacl::TrainConfig config = eacl::parse_config_file(config_path);
      eacl::TrainArtifacts artifacts = eacl::cmd_train(config, corpus_path, out_dir);
      std::cout << "test weighted_f1 " << artifacts.report.weighted_f1 << "\n";
      std::cout << "artifacts in " << out_dir << "\n";
    } else if (*eval) {
      eacl::EvalReport report = eacl::cmd_eval(checkpoint_path, corpus_path);
      std::cout << eacl::eval_report_to_json(report) << "\n";
    } else if (*ablate) {
      eacl::TrainConfig config = eacl::parse_config_file(config_path);
      eacl::AblateResult result = eacl::cmd_ablate(config, corpus_path, out_dir, seeds);
      std::cout << result.table_text;
    } else if (*analyze) {
      eacl::AnchorAnalysis a = eacl::cmd_analyze_anchors(init_ckpt, final_ckpt, out_path);
      std::cout << "min angle " << a.initial.min_angle_deg << " -> " << a.final_.min_angle_deg
                << " deg (delta " << a.min_angle_delta_deg << ")\n";
    } else if (*synth) {
      eacl::cmd_synth(classes, per_class, parse_pairs(similar_specs), noise, seed, out_path);
      std::cout << "wrote " << out_path << "\n";
    }
  } catch (const eacl::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const eacl::DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const eacl::NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
