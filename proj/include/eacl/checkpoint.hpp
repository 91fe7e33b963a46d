#ifndef EACL_CHECKPOINT_HPP_
#define EACL_CHECKPOINT_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "eacl/encoder.hpp"
#include "eacl/losses.hpp"

namespace eacl {

// Everything cmd_eval needs to featurize a new corpus the same way the
// training run did.
struct CheckpointMeta {
  std::string config_hash;
  std::vector<std::string> label_texts;
  std::size_t k = 0;
  std::uint64_t feature_seed = 0;
  SupconVariant supcon_variant = SupconVariant::literal;
};

struct Checkpoint {
  ModelState state;
  CheckpointMeta meta;
};

// JSON container; doubles are written with 17 significant digits so the
// round trip is bit-faithful.
void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace eacl

#endif  // EACL_CHECKPOINT_HPP_
