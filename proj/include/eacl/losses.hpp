#ifndef EACL_LOSSES_HPP_
#define EACL_LOSSES_HPP_

#include <vector>

#include "eacl/diffmath.hpp"

namespace eacl {

enum class SupconVariant {
  literal,       // formula as printed: positive-sum ratio, |V+| inside the
                 // log, denominator over all rows including self
  conventional,  // standard SupCon: mean of per-positive logs, self excluded
};

// Joint view of a minibatch: b utterance representations followed by the
// s emotion anchors, one anchor row per class, anchor labels = class ids.
struct ContrastiveBatch {
  Matrix v;                 // (b+s) x d
  std::vector<int> labels;  // size b+s
  std::size_t utterance_rows = 0;
  std::size_t class_count = 0;
  double tau = 0.1;
};

ContrastiveBatch make_contrastive_batch(const Matrix& representations,
                                        const std::vector<int>& labels,
                                        const Matrix& anchors, double tau);

struct SupLossResult {
  double value = 0.0;
  Matrix grad_v;               // gradient w.r.t. every row of V
  std::size_t skipped_rows = 0;  // rows with empty positive sets
};

// Emotion-anchored contrastive loss. Every row acts as a query; a row's
// positives are the other rows with its label. Rows with no positives
// contribute nothing and are counted in skipped_rows.
SupLossResult sup_loss(const ContrastiveBatch& batch,
                       SupconVariant variant = SupconVariant::literal);

struct CeLossResult {
  double value = 0.0;
  Matrix grad_logits;
};

// Mean softmax cross-entropy over the batch.
CeLossResult ce_loss(const Matrix& logits, const std::vector<int>& labels);

struct AngleLossResult {
  double value = 0.0;
  Matrix grad_anchors;
};

// Minus the mean, over anchors, of each anchor's minimum pairwise angle.
// The subgradient flows through the arg-min pair only; angle ties break
// toward the lowest index.
AngleLossResult angle_loss(const Matrix& anchors);

struct StageOneLossResult {
  double value = 0.0;
  double sup_value = 0.0;
  double angle_value = 0.0;
  double ce_value = 0.0;
  Matrix grad_v;       // lambda1 * sup grads; anchor rows also carry
                       // lambda1 * lambda2 * angle grads
  Matrix grad_logits;  // (1 - lambda1) * ce grads
  std::size_t skipped_rows = 0;
};

// lambda1 * (L_sup + lambda2 * L_angle) + (1 - lambda1) * L_ce,
// gradients merged by linearity.
StageOneLossResult stage_one_loss(const ContrastiveBatch& batch,
                                  const Matrix& logits,
                                  const std::vector<int>& labels,
                                  double lambda1, double lambda2,
                                  const Matrix& anchors,
                                  SupconVariant variant = SupconVariant::literal);

struct AdaLossResult {
  double value = 0.0;
  Matrix grad_anchors;  // representations are frozen in stage two
};

// Softmax cross-entropy over temperature-scaled cosine similarities
// between representations and anchors.
AdaLossResult ada_loss(const Matrix& representations,
                       const Matrix& anchors,
                       const std::vector<int>& labels, double tau);

}  // namespace eacl

#endif  // EACL_LOSSES_HPP_
