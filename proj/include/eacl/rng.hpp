#ifndef EACL_RNG_HPP_
#define EACL_RNG_HPP_

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace eacl {

// FNV-1a over arbitrary bytes. Used for token hashing, seed derivation and
// corpus fingerprints. Stable across platforms.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t basis_xor = 0);

std::uint64_t splitmix64(std::uint64_t x);

// Derives an independent stream seed from a root seed and a fixed label.
// All randomness in the project flows from one root seed through this.
std::uint64_t derive_seed(std::uint64_t root, std::string_view label);

// mt19937_64 wrapper with explicit, implementation-independent draw
// mappings. std::uniform_*_distribution and std::shuffle are not portable
// bit-for-bit, so we avoid them.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Unbiased integer in [0, n) via rejection sampling.
  std::uint64_t below(std::uint64_t n);

  // In-place Fisher-Yates.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace eacl

#endif  // EACL_RNG_HPP_
