#include "eacl/pipeline.hpp"

#include "eacl/errors.hpp"

namespace eacl {

ExperimentResult run_experiment(const TrainConfig& config,
                                const std::vector<Conversation>& conversations,
                                const std::vector<EmotionLabel>& labels) {
  validate_config(config);
  if (conversations.empty()) throw DataError("run_experiment: empty corpus");
  if (labels.empty()) throw DataError("run_experiment: empty label set");

  ExperimentResult result;
  result.config = config;
  result.labels = labels;

  CorpusSplit split = split_corpus(conversations, config.dev_frac, config.test_frac, config.seed);
  if (split.train.empty()) throw DataError("run_experiment: training split is empty");

  const std::uint64_t feature_seed = derive_seed(config.seed, "features");
  result.samples.train = make_samples(split.train, config.k, config.f, feature_seed);
  if (!split.dev.empty()) {
    result.samples.dev = make_samples(split.dev, config.k, config.f, feature_seed);
  }
  if (!split.test.empty()) {
    result.samples.test = make_samples(split.test, config.k, config.f, feature_seed);
  }
  result.train_stats = corpus_stats(split.train, labels);
  result.dev_stats = corpus_stats(split.dev, labels);
  result.test_stats = corpus_stats(split.test, labels);

  Matrix label_features(labels.size(), config.f);
  for (std::size_t c = 0; c < labels.size(); ++c) {
    label_features.set_row(c, featurize(labels[c].text, config.f, feature_seed));
  }

  ModelState state = init_model(config.f, config.d, labels.size(), label_features,
                                derive_seed(config.seed, "init"));
  result.init_state = state;

  result.log = train_stage_one(state, result.samples.train, config, result.samples.dev);
  result.stage1_state = state;

  Matrix train_reps = represent(state, result.samples.train);
  enter_stage_two(state, config, train_reps, sample_labels(result.samples.train));

  if (config.ablation != Ablation::no_adapt && config.stage2_epochs > 0) {
    TrainLog stage2 = train_stage_two(state, result.samples.train, config, result.samples.dev);
    result.log.insert(result.log.end(), stage2.begin(), stage2.end());
  }
  result.final_state = state;

  const std::vector<EncodedSample>& eval_samples =
      result.samples.test.empty() ? result.samples.train : result.samples.test;
  std::vector<int> pred = predict(state, eval_samples);
  result.test_report = evaluate(sample_labels(eval_samples), pred, labels.size());
  return result;
}

}  // namespace eacl
