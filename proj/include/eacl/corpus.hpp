#ifndef EACL_CORPUS_HPP_
#define EACL_CORPUS_HPP_

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "eacl/diffmath.hpp"

namespace eacl {

struct EmotionLabel {
  int id = 0;          // dense, unique, 0-based
  std::string text;    // unique, non-empty
};

struct Utterance {
  std::string speaker;
  std::string text;
  int label = 0;
};

struct Conversation {
  std::string id;
  std::vector<Utterance> utterances;
};

// A composed prompt window reduced to a fixed-dimension feature vector.
struct EncodedSample {
  Vector features;
  int label = 0;
  std::string conversation_id;
  int turn_index = 0;
};

struct CorpusStats {
  std::size_t dialogues = 0;
  std::size_t utterances = 0;
  std::vector<std::size_t> class_counts;
  std::vector<std::string> class_list;
};

enum class CorpusFormat { jsonl };

struct LoadedCorpus {
  std::vector<Conversation> conversations;
  std::vector<EmotionLabel> labels;
  std::vector<std::string> warnings;
};

// One conversation object per line; the first line declares the label set
// and its order. Malformed lines and unknown labels are errors.
LoadedCorpus load_corpus(const std::string& path,
                         CorpusFormat format = CorpusFormat::jsonl);

void save_corpus(const std::vector<Conversation>& conversations,
                 const std::vector<EmotionLabel>& labels,
                 const std::string& path);

// Context window of turns max(0, t-k)..t rendered as "Speaker: text"
// segments, followed by the prediction prompt for turn t.
std::string compose_prompt(const Conversation& conv, std::size_t t, std::size_t k);

// Deterministic signed feature hashing over unigrams and bigrams of the
// lowercased prompt, L2-normalized. A prompt with no tokens is an error.
Vector featurize(const std::string& prompt, std::size_t f, std::uint64_t seed);

std::vector<EncodedSample> make_samples(const std::vector<Conversation>& conversations,
                                        std::size_t k, std::size_t f,
                                        std::uint64_t seed);

struct SynthCorpus {
  std::vector<Conversation> conversations;
  std::vector<EmotionLabel> labels;
};

// Desk-scale generator: each dialogue holds one utterance per class in a
// shuffled order, so class counts stay balanced and every
// conversation-level split stays balanced too. Classes in a similar pair
// share a (1-noise) fraction of their token vocabulary.
SynthCorpus synth_corpus(std::size_t s, std::size_t n_per_class,
                         const std::vector<std::pair<int, int>>& similar_pairs,
                         double noise, std::uint64_t seed);

CorpusStats corpus_stats(const std::vector<Conversation>& conversations,
                         const std::vector<EmotionLabel>& labels);

struct CorpusSplit {
  std::vector<Conversation> train;
  std::vector<Conversation> dev;
  std::vector<Conversation> test;
};

// Seeded conversation-level split; file order is preserved inside each
// split. Counts are llround(n * frac).
CorpusSplit split_corpus(const std::vector<Conversation>& conversations,
                         double dev_frac, double test_frac, std::uint64_t seed);

}  // namespace eacl

#endif  // EACL_CORPUS_HPP_
