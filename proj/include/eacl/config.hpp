#ifndef EACL_CONFIG_HPP_
#define EACL_CONFIG_HPP_

#include <cstdint>
#include <string>

#include "eacl/losses.hpp"

namespace eacl {

enum class Ablation {
  none,
  no_angle,        // lambda2 = 0 in stage one
  no_ce,           // lambda1 = 1 in stage one
  no_inherit,      // stage-two anchors re-randomized
  no_adapt,        // stage-two training skipped
  center_anchors,  // stage-two anchors = per-class representation means
};

std::string to_string(Ablation a);
Ablation ablation_from_string(const std::string& s);
std::string to_string(SupconVariant v);
SupconVariant supcon_variant_from_string(const std::string& s);

// lambda1/lambda2/tau/epochs/learning_rate defaults follow the published
// IEMOCAP settings; dimensions, context size, batch size and the split
// fractions are desk-scale choices.
struct TrainConfig {
  double lambda1 = 0.9;
  double lambda2 = 0.01;
  double tau = 0.1;
  std::size_t k = 4;    // context turns before the target utterance
  std::size_t f = 256;  // hashed feature dimension
  std::size_t d = 32;   // hidden dimension
  std::size_t batch_size = 16;
  std::size_t stage1_epochs = 8;
  std::size_t stage2_epochs = 5;
  double learning_rate = 1e-5;
  std::uint64_t seed = 7;
  SupconVariant supcon_variant = SupconVariant::literal;
  Ablation ablation = Ablation::none;
  double dev_frac = 0.0;   // conversation-level split fractions
  double test_frac = 0.25;
};

// Flat "key = value" file, '#' comments, unknown keys are errors.
TrainConfig parse_config_file(const std::string& path);
TrainConfig parse_config_text(const std::string& text, const std::string& origin);

void validate_config(const TrainConfig& config);

// Canonical serialization; also the basis of the config hash stored in
// checkpoints.
std::string config_to_text(const TrainConfig& config);
std::string config_hash(const TrainConfig& config);

}  // namespace eacl

#endif  // EACL_CONFIG_HPP_
