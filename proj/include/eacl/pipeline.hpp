#ifndef EACL_PIPELINE_HPP_
#define EACL_PIPELINE_HPP_

#include <vector>

#include "eacl/config.hpp"
#include "eacl/corpus.hpp"
#include "eacl/encoder.hpp"
#include "eacl/metrics.hpp"
#include "eacl/trainer.hpp"

namespace eacl {

struct SplitSamples {
  std::vector<EncodedSample> train;
  std::vector<EncodedSample> dev;
  std::vector<EncodedSample> test;
};

// One full run: split, featurize, two training stages, evaluation on the
// held-out split (the training split when test_frac is 0).
struct ExperimentResult {
  TrainConfig config;
  std::vector<EmotionLabel> labels;
  SplitSamples samples;
  CorpusStats train_stats, dev_stats, test_stats;
  ModelState init_state;
  ModelState stage1_state;
  ModelState final_state;
  TrainLog log;
  EvalReport test_report;
};

ExperimentResult run_experiment(const TrainConfig& config,
                                const std::vector<Conversation>& conversations,
                                const std::vector<EmotionLabel>& labels);

}  // namespace eacl

#endif  // EACL_PIPELINE_HPP_
