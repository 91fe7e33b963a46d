#ifndef EACL_TRAINER_HPP_
#define EACL_TRAINER_HPP_

#include <string>
#include <vector>

#include "eacl/config.hpp"
#include "eacl/corpus.hpp"
#include "eacl/encoder.hpp"

namespace eacl {

// One record per epoch per stage. Stage-one loss fields are means over the
// epoch's minibatches; the stage-two ada field is the full-batch loss at
// the start of the epoch, so the first record holds the pre-adaptation
// value. min_angle_deg and dev_f1 reflect the post-epoch state.
struct EpochRecord {
  int stage = 1;
  std::size_t epoch = 0;
  double total = 0.0;
  double sup = 0.0;
  double angle = 0.0;
  double ce = 0.0;
  double ada = 0.0;
  std::size_t skipped_rows = 0;
  double min_angle_deg = 0.0;
  double dev_f1 = 0.0;
  bool selected = false;
};

using TrainLog = std::vector<EpochRecord>;

std::string epoch_record_to_json(const EpochRecord& rec);

// Stage one: seeded shuffle into minibatches (final partial batch kept),
// plain SGD on encoder, proj_cl and head_ce under the combined loss.
// anchor_hidden is never touched. The best dev-F1 epoch's parameters are
// retained; selection falls back to the training split when dev is empty.
TrainLog train_stage_one(ModelState& state,
                         const std::vector<EncodedSample>& samples,
                         const TrainConfig& config,
                         const std::vector<EncodedSample>& dev_samples);

// Freezes everything except the anchors and initializes them per the
// configured ablation. train_representations/train_labels are only read
// for center_anchors.
void enter_stage_two(ModelState& state, const TrainConfig& config,
                     const Matrix& train_representations,
                     const std::vector<int>& train_labels);

// Full-batch gradient descent on the anchors only; representations are
// computed once with the frozen encoder.
TrainLog train_stage_two(ModelState& state,
                         const std::vector<EncodedSample>& samples,
                         const TrainConfig& config,
                         const std::vector<EncodedSample>& dev_samples);

// Nearest-anchor prediction under cosine similarity; ties go to the
// lowest class id.
std::vector<int> predict(const ModelState& state,
                         const std::vector<EncodedSample>& samples);

std::vector<int> predict_from_representations(const Matrix& representations,
                                              const Matrix& anchors);

std::vector<int> sample_labels(const std::vector<EncodedSample>& samples);

}  // namespace eacl

#endif  // EACL_TRAINER_HPP_
