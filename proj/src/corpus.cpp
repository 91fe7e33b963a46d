#include "eacl/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "eacl/errors.hpp"
#include "eacl/rng.hpp"

namespace eacl {

namespace {

using nlohmann::json;

void validate_labels(const std::vector<EmotionLabel>& labels) {
  std::unordered_set<std::string> seen;
  for (const auto& label : labels) {
    if (label.text.empty()) throw DataError("label text must be non-empty");
    if (!seen.insert(label.text).second) {
      throw DataError("duplicate label text: " + label.text);
    }
  }
}

}  // namespace

LoadedCorpus load_corpus(const std::string& path, CorpusFormat format) {
  if (format != CorpusFormat::jsonl) throw ValidationError("unsupported corpus format");
  std::ifstream in(path);
  if (!in) throw DataError("cannot open corpus file: " + path);

  LoadedCorpus out;
  std::unordered_map<std::string, int> label_ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::exception& e) {
      throw DataError("corpus parse error at line " + std::to_string(line_no) +
                      ": " + e.what());
    }
    try {
      if (obj.contains("labels")) {
        std::vector<std::string> declared = obj.at("labels").get<std::vector<std::string>>();
        if (out.labels.empty() && label_ids.empty()) {
          for (const auto& text : declared) {
            EmotionLabel label;
            label.id = static_cast<int>(out.labels.size());
            label.text = text;
            label_ids.emplace(text, label.id);
            out.labels.push_back(std::move(label));
          }
          validate_labels(out.labels);
        } else {
          std::vector<std::string> have;
          for (const auto& l : out.labels) have.push_back(l.text);
          if (declared != have) {
            throw DataError("line " + std::to_string(line_no) +
                            ": label declaration conflicts with first line");
          }
        }
      } else if (out.labels.empty()) {
        throw DataError("first corpus line must declare \"labels\"");
      }

      Conversation conv;
      conv.id = obj.at("id").get<std::string>();
      for (const auto& turn : obj.at("turns")) {
        Utterance u;
        u.speaker = turn.at("speaker").get<std::string>();
        u.text = turn.at("text").get<std::string>();
        if (u.text.empty()) {
          throw DataError("line " + std::to_string(line_no) +
                          ": empty utterance text in conversation " + conv.id);
        }
        std::string label_text = turn.at("label").get<std::string>();
        auto it = label_ids.find(label_text);
        if (it == label_ids.end()) {
          throw DataError("line " + std::to_string(line_no) +
                          ": label \"" + label_text + "\" not in declared label set");
        }
        u.label = it->second;
        conv.utterances.push_back(std::move(u));
      }
      if (conv.utterances.empty()) {
        throw DataError("line " + std::to_string(line_no) +
                        ": conversation " + conv.id + " has no utterances");
      }
      out.conversations.push_back(std::move(conv));
    } catch (const json::exception& e) {
      throw DataError("corpus schema error at line " + std::to_string(line_no) +
                      ": " + e.what());
    }
  }
  if (out.conversations.empty()) {
    out.warnings.push_back("corpus file " + path + " is empty");
  }
  return out;
}

void save_corpus(const std::vector<Conversation>& conversations,
                 const std::vector<EmotionLabel>& labels,
                 const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write corpus file: " + path);
  bool first = true;
  for (const auto& conv : conversations) {
    json obj;
    obj["id"] = conv.id;
    if (first) {
      std::vector<std::string> texts;
      for (const auto& l : labels) texts.push_back(l.text);
      obj["labels"] = texts;
      first = false;
    }
    json turns = json::array();
    for (const auto& u : conv.utterances) {
      turns.push_back({{"speaker", u.speaker},
                       {"text", u.text},
                       {"label", labels.at(static_cast<std::size_t>(u.label)).text}});
    }
    obj["turns"] = turns;
    out << obj.dump() << "\n";
  }
}

std::string compose_prompt(const Conversation& conv, std::size_t t, std::size_t k) {
  if (t >= conv.utterances.size()) {
    throw ValidationError("compose_prompt: turn " + std::to_string(t) +
                          " out of range for conversation " + conv.id);
  }
  std::size_t start = t >= k ? t - k : 0;  // truncate at the conversation start
  std::ostringstream out;
  for (std::size_t i = start; i <= t; ++i) {
    const auto& u = conv.utterances[i];
    if (i > start) out << ' ';
    out << u.speaker << ": " << u.text;
  }
  const auto& target = conv.utterances[t];
  out << " For utterance \"" << target.text << "\", speaker " << target.speaker
      << " feels <mask>";
  return out.str();
}

namespace {

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char ch : text) {
    unsigned char c = static_cast<unsigned char>(ch);
    if (std::isalnum(c) || ch == '_') {
      current.push_back(static_cast<char>(std::tolower(c)));
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

void hash_into(const std::string& key, std::uint64_t seed, std::size_t f, Vector& acc) {
  std::uint64_t h = fnv1a64(key, splitmix64(seed));
  std::size_t bucket = static_cast<std::size_t>((h & 0x7fffffffffffffffull) % f);
  double sign = (h >> 63) ? -1.0 : 1.0;
  acc[bucket] += sign;
}

}  // namespace

Vector featurize(const std::string& prompt, std::size_t f, std::uint64_t seed) {
  if (f < 8) throw ValidationError("featurize: dimension must be at least 8");
  std::vector<std::string> tokens = tokenize(prompt);
  if (tokens.empty()) throw DataError("featurize: prompt has no tokens");
  Vector acc(f, 0.0);
  for (const auto& tok : tokens) hash_into(tok, seed, f, acc);
  for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
    hash_into(tokens[i] + "\x01" + tokens[i + 1], seed, f, acc);
  }
  double n = norm(acc);
  if (n == 0.0) throw NumericError("featurize: signed counts cancelled to zero");
  for (double& x : acc) x /= n;
  return acc;
}

std::vector<EncodedSample> make_samples(const std::vector<Conversation>& conversations,
                                        std::size_t k, std::size_t f,
                                        std::uint64_t seed) {
  if (conversations.empty()) throw DataError("make_samples: empty corpus");
  std::vector<EncodedSample> samples;
  for (const auto& conv : conversations) {
    for (std::size_t t = 0; t < conv.utterances.size(); ++t) {
      EncodedSample sample;
      sample.features = featurize(compose_prompt(conv, t, k), f, seed);
      sample.label = conv.utterances[t].label;
      sample.conversation_id = conv.id;
      sample.turn_index = static_cast<int>(t);
      samples.push_back(std::move(sample));
    }
  }
  return samples;
}

namespace {

// Pronounceable-ish unique token, lowercase letters only.
std::string fresh_token(Rng& rng, std::set<std::string>& used) {
  for (;;) {
    std::size_t len = 4 + rng.below(4);
    std::string tok;
    for (std::size_t i = 0; i < len; ++i) {
      tok.push_back(static_cast<char>('a' + rng.below(26)));
    }
    if (used.insert(tok).second) return tok;
  }
}

}  // namespace

SynthCorpus synth_corpus(std::size_t s, std::size_t n_per_class,
                         const std::vector<std::pair<int, int>>& similar_pairs,
                         double noise, std::uint64_t seed) {
  if (s < 2) throw ValidationError("synth_corpus: need at least 2 classes");
  if (n_per_class == 0) throw ValidationError("synth_corpus: n_per_class must be positive");
  if (noise < 0.0 || noise >= 1.0) throw ValidationError("synth_corpus: noise must be in [0,1)");
  for (const auto& [a, b] : similar_pairs) {
    if (a < 0 || b < 0 || a >= static_cast<int>(s) || b >= static_cast<int>(s) || a == b) {
      throw ValidationError("synth_corpus: invalid similar pair (" +
                            std::to_string(a) + "," + std::to_string(b) + ")");
    }
  }

  // Small vocabularies and fairly long utterances keep the within-class
  // token overlap well above the shared prompt-template floor.
  constexpr std::size_t kVocabPerClass = 12;
  Rng rng(derive_seed(seed, "synth"));
  std::set<std::string> used;

  std::vector<std::vector<std::string>> vocab(s);
  for (std::size_t c = 0; c < s; ++c) {
    for (std::size_t i = 0; i < kVocabPerClass; ++i) {
      vocab[c].push_back(fresh_token(rng, used));
    }
  }
  // Overwrite the head of the second class's vocabulary with the first's,
  // so the pair shares a (1-noise) fraction. noise=0 makes them identical.
  for (const auto& [a, b] : similar_pairs) {
    auto shared = static_cast<std::size_t>(
        std::llround((1.0 - noise) * static_cast<double>(kVocabPerClass)));
    for (std::size_t i = 0; i < shared; ++i) {
      vocab[static_cast<std::size_t>(b)][i] = vocab[static_cast<std::size_t>(a)][i];
    }
  }

  SynthCorpus out;
  for (std::size_t c = 0; c < s; ++c) {
    EmotionLabel label;
    label.id = static_cast<int>(c);
    // Two dedicated tokens outside every utterance vocabulary.
    label.text = fresh_token(rng, used) + " " + fresh_token(rng, used);
    out.labels.push_back(std::move(label));
  }

  for (std::size_t dlg = 0; dlg < n_per_class; ++dlg) {
    Conversation conv;
    {
      std::ostringstream id;
      id << "synth-" << dlg;
      conv.id = id.str();
    }
    std::vector<int> order(s);
    for (std::size_t c = 0; c < s; ++c) order[c] = static_cast<int>(c);
    rng.shuffle(order);
    for (std::size_t turn = 0; turn < s; ++turn) {
      int cls = order[turn];
      const auto& v = vocab[static_cast<std::size_t>(cls)];
      std::size_t len = 6 + rng.below(5);
      std::ostringstream text;
      for (std::size_t i = 0; i < len; ++i) {
        if (i > 0) text << ' ';
        text << v[rng.below(v.size())];
      }
      Utterance u;
      u.speaker = (turn % 2 == 0) ? "A" : "B";
      u.text = text.str();
      u.label = cls;
      conv.utterances.push_back(std::move(u));
    }
    out.conversations.push_back(std::move(conv));
  }
  return out;
}

CorpusStats corpus_stats(const std::vector<Conversation>& conversations,
                         const std::vector<EmotionLabel>& labels) {
  CorpusStats stats;
  stats.dialogues = conversations.size();
  stats.class_counts.assign(labels.size(), 0);
  for (const auto& l : labels) stats.class_list.push_back(l.text);
  for (const auto& conv : conversations) {
    stats.utterances += conv.utterances.size();
    for (const auto& u : conv.utterances) {
      stats.class_counts.at(static_cast<std::size_t>(u.label)) += 1;
    }
  }
  return stats;
}

CorpusSplit split_corpus(const std::vector<Conversation>& conversations,
                         double dev_frac, double test_frac, std::uint64_t seed) {
  if (dev_frac < 0.0 || test_frac < 0.0 || dev_frac + test_frac >= 1.0 + 1e-12) {
    throw ValidationError("split_corpus: fractions must be non-negative and sum below 1");
  }
  std::size_t n = conversations.size();
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  Rng rng(derive_seed(seed, "split"));
  rng.shuffle(idx);

  auto n_test = static_cast<std::size_t>(std::llround(static_cast<double>(n) * test_frac));
  auto n_dev = static_cast<std::size_t>(std::llround(static_cast<double>(n) * dev_frac));
  if (n_test + n_dev > n) throw ValidationError("split_corpus: split exceeds corpus size");

  std::vector<std::size_t> test_idx(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_test));
  std::vector<std::size_t> dev_idx(idx.begin() + static_cast<std::ptrdiff_t>(n_test),
                                   idx.begin() + static_cast<std::ptrdiff_t>(n_test + n_dev));
  std::vector<std::size_t> train_idx(idx.begin() + static_cast<std::ptrdiff_t>(n_test + n_dev), idx.end());
  std::sort(test_idx.begin(), test_idx.end());
  std::sort(dev_idx.begin(), dev_idx.end());
  std::sort(train_idx.begin(), train_idx.end());

  CorpusSplit split;
  for (std::size_t i : train_idx) split.train.push_back(conversations[i]);
  for (std::size_t i : dev_idx) split.dev.push_back(conversations[i]);
  for (std::size_t i : test_idx) split.test.push_back(conversations[i]);
  return split;
}

}  // namespace eacl
