#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "fakenews/corpus.hpp"
#include "fakenews/text.hpp"

namespace fakenews {

using TokenId = std::int32_t;
inline constexpr TokenId kPadding = 0;

/// Frequency-ordered word index. Index 0 is reserved for padding; words
/// occupy 1..size().
class Vocabulary {
 public:
  Vocabulary() = default;
  /// Words in index order (first word gets index 1). Counts are optional and
  /// only used as the skip-gram noise distribution.
  explicit Vocabulary(std::vector<std::string> words, std::vector<std::size_t> counts = {});

  std::size_t size() const { return words_.size(); }
  bool empty() const { return words_.empty(); }

  std::optional<TokenId> find(std::string_view word) const;
  bool contains(std::string_view word) const { return find(word).has_value(); }
  /// index must be in 1..size().
  const std::string& word(TokenId index) const;
  const std::vector<std::string>& words() const { return words_; }
  /// Training-corpus frequency of each word, aligned with words(); may be empty.
  const std::vector<std::size_t>& counts() const { return counts_; }

  /// SHA-256 over the words in index order.
  const std::string& hash() const { return hash_; }

  /// JSON array in index order; position p holds the word with index p + 1.
  nlohmann::json to_json() const;
  static Vocabulary from_json(const nlohmann::json& j);

  bool operator==(const Vocabulary& other) const { return words_ == other.words_; }

 private:
  std::vector<std::string> words_;
  std::vector<std::size_t> counts_;
  std::unordered_map<std::string, TokenId> index_;
  std::string hash_;
};

struct VocabularyOptions {
  std::optional<std::size_t> max_size;
  std::size_t min_count = 1;
  TokenizerOptions tokenizer;
};

/// Words ranked by descending frequency, ties lexicographic. Throws on an
/// empty corpus.
Vocabulary build_vocabulary(const Corpus& corpus, const VocabularyOptions& options = {});
Vocabulary build_vocabulary(std::span<const std::vector<std::string>> documents, const VocabularyOptions& options = {});

inline constexpr std::size_t kDefaultSequenceLength = 500;

/// Fixed-length index sequence, zero padded at the tail.
struct TokenSequence {
  std::vector<TokenId> indices;
  std::size_t true_length = 0;
  /// For each of the first true_length entries, the position of the token
  /// in the input token list it was encoded from.
  std::vector<std::size_t> source_positions;
};

/// Out-of-vocabulary tokens are dropped; the first max_len surviving tokens
/// are kept.
TokenSequence encode_sequence(std::span<const std::string> tokens, const Vocabulary& vocab,
                              std::size_t max_len = kDefaultSequenceLength);

}  // namespace fakenews
