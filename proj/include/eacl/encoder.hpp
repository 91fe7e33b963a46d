#ifndef EACL_ENCODER_HPP_
#define EACL_ENCODER_HPP_

#include <cstdint>
#include <vector>

#include "eacl/corpus.hpp"
#include "eacl/diffmath.hpp"

namespace eacl {

enum class Stage { one, two };

// Trainable desk-scale encoder standing in for a pretrained language
// model, plus the contrastive projection and the auxiliary
// classification head.
//
// anchor_hidden is computed once from the label features at init time and
// never changes. In stage one the anchors are a function of proj_cl; in
// stage two they become free parameters and everything else freezes.
struct ModelState {
  std::size_t feature_dim = 0;  // f
  std::size_t hidden_dim = 0;   // d
  std::size_t class_count = 0;  // s

  MlpParams encoder;   // f -> d, one hidden layer
  MlpParams proj_cl;   // d -> d, one hidden layer
  MlpParams head_ce;   // d -> s, single affine layer

  Matrix anchor_hidden;  // s x d, frozen
  Matrix anchors;        // s x d, free parameters in stage two
  Stage stage = Stage::one;
};

ModelState init_model(std::size_t f, std::size_t d, std::size_t s,
                      const Matrix& label_features, std::uint64_t seed);

struct EncodeResult {
  Matrix r;  // b x d
  std::vector<MlpCache> encoder_caches;
  std::vector<MlpCache> proj_caches;
};

// Stage-one training path: representations with backward caches.
EncodeResult encode_batch(const ModelState& state,
                          const std::vector<EncodedSample>& samples);

// Representations without caches; valid in either stage.
Matrix represent(const ModelState& state,
                 const std::vector<EncodedSample>& samples);

// Stage one: proj_cl applied to the frozen anchor hidden states under the
// current projection weights. Stage two: the free anchor parameters.
Matrix current_anchors(const ModelState& state);

struct AnchorForward {
  Matrix anchors;
  std::vector<MlpCache> proj_caches;
};

AnchorForward current_anchors_cached(const ModelState& state);

struct LogitsResult {
  Matrix logits;  // b x s
  std::vector<MlpCache> encoder_caches;
  std::vector<MlpCache> head_caches;
};

// The classification head reads the encoder hidden state, not the
// projected representation.
LogitsResult ce_logits(const ModelState& state,
                       const std::vector<EncodedSample>& samples);

}  // namespace eacl

#endif  // EACL_ENCODER_HPP_
