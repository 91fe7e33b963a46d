#include "eacl/encoder.hpp"

#include "eacl/errors.hpp"

namespace eacl {

ModelState init_model(std::size_t f, std::size_t d, std::size_t s,
                      const Matrix& label_features, std::uint64_t seed) {
  if (label_features.rows != s || label_features.cols != f) {
    throw ValidationError("init_model: label feature matrix must be " +
                          std::to_string(s) + "x" + std::to_string(f) + ", got " +
                          std::to_string(label_features.rows) + "x" +
                          std::to_string(label_features.cols));
  }
  ModelState state;
  state.feature_dim = f;
  state.hidden_dim = d;
  state.class_count = s;

  Rng enc_rng(derive_seed(seed, "encoder"));
  Rng proj_rng(derive_seed(seed, "proj_cl"));
  Rng head_rng(derive_seed(seed, "head_ce"));
  state.encoder = init_mlp({f, d, d}, enc_rng);
  state.proj_cl = init_mlp({d, d, d}, proj_rng);
  state.head_ce = init_mlp({d, s}, head_rng);

  state.anchor_hidden = Matrix(s, d);
  for (std::size_t c = 0; c < s; ++c) {
    Vector hidden = mlp_forward(state.encoder, label_features.row(c), nullptr);
    state.anchor_hidden.set_row(c, hidden);
  }
  state.anchors = current_anchors(state);
  state.stage = Stage::one;
  return state;
}

EncodeResult encode_batch(const ModelState& state,
                          const std::vector<EncodedSample>& samples) {
  EncodeResult result;
  result.r = Matrix(samples.size(), state.hidden_dim);
  result.encoder_caches.resize(samples.size());
  result.proj_caches.resize(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    Vector z = mlp_forward(state.encoder, samples[i].features, &result.encoder_caches[i]);
    Vector r = mlp_forward(state.proj_cl, z, &result.proj_caches[i]);
    result.r.set_row(i, r);
  }
  return result;
}

Matrix represent(const ModelState& state, const std::vector<EncodedSample>& samples) {
  Matrix r(samples.size(), state.hidden_dim);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    Vector z = mlp_forward(state.encoder, samples[i].features, nullptr);
    r.set_row(i, mlp_forward(state.proj_cl, z, nullptr));
  }
  return r;
}

Matrix current_anchors(const ModelState& state) {
  if (state.stage == Stage::two) return state.anchors;
  Matrix anchors(state.class_count, state.hidden_dim);
  for (std::size_t c = 0; c < state.class_count; ++c) {
    anchors.set_row(c, mlp_forward(state.proj_cl, state.anchor_hidden.row(c), nullptr));
  }
  return anchors;
}

AnchorForward current_anchors_cached(const ModelState& state) {
  if (state.stage != Stage::one) {
    throw ValidationError("current_anchors_cached: only meaningful in stage one");
  }
  AnchorForward fwd;
  fwd.anchors = Matrix(state.class_count, state.hidden_dim);
  fwd.proj_caches.resize(state.class_count);
  for (std::size_t c = 0; c < state.class_count; ++c) {
    fwd.anchors.set_row(c, mlp_forward(state.proj_cl, state.anchor_hidden.row(c),
                                       &fwd.proj_caches[c]));
  }
  return fwd;
}

LogitsResult ce_logits(const ModelState& state,
                       const std::vector<EncodedSample>& samples) {
  LogitsResult result;
  result.logits = Matrix(samples.size(), state.class_count);
  result.encoder_caches.resize(samples.size());
  result.head_caches.resize(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    Vector z = mlp_forward(state.encoder, samples[i].features, &result.encoder_caches[i]);
    Vector logits = mlp_forward(state.head_ce, z, &result.head_caches[i]);
    result.logits.set_row(i, logits);
  }
  return result;
}

}  // namespace eacl
