#include "fakenews/vocabulary.hpp"

#include <algorithm>

#include "fakenews/hash.hpp"

namespace fakenews {

Vocabulary::Vocabulary(std::vector<std::string> words, std::vector<std::size_t> counts)
    : words_(std::move(words)), counts_(std::move(counts)) {
  if (!counts_.empty() && counts_.size() != words_.size()) {
    throw InputError("vocabulary counts do not match words");
  }
  index_.reserve(words_.size());
  std::string joined;
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (words_[i].empty()) throw InputError("vocabulary contains an empty word");
    if (!index_.emplace(words_[i], static_cast<TokenId>(i + 1)).second) {
      throw InputError("vocabulary contains duplicate word '" + words_[i] + "'");
    }
    joined += words_[i];
    joined += '\n';
  }
  hash_ = sha256_hex(joined);
}

std::optional<TokenId> Vocabulary::find(std::string_view word) const {
  const auto it = index_.find(std::string(word));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

const std::string& Vocabulary::word(TokenId index) const {
  if (index < 1 || static_cast<std::size_t>(index) > words_.size()) {
    throw InputError("vocabulary index " + std::to_string(index) + " out of range");
  }
  return words_[static_cast<std::size_t>(index) - 1];
}

nlohmann::json Vocabulary::to_json() const { return nlohmann::json(words_); }

Vocabulary Vocabulary::from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw InputError("vocabulary JSON must be an array");
  std::vector<std::string> words;
  words.reserve(j.size());
  for (const auto& w : j) {
    if (!w.is_string()) throw InputError("vocabulary JSON entries must be strings");
    words.push_back(w.get<std::string>());
  }
  return Vocabulary(std::move(words));
}

Vocabulary build_vocabulary(std::span<const std::vector<std::string>> documents, const VocabularyOptions& options) {
  if (documents.empty()) throw InputError("cannot build a vocabulary from an empty corpus");
  if (options.min_count < 1) throw InputError("min_count must be at least 1");
  std::unordered_map<std::string, std::size_t> counts;
  for (const auto& tokens : documents) {
    for (const auto& t : tokens) ++counts[t];
  }
  std::vector<std::pair<std::string, std::size_t>> ranked;
  ranked.reserve(counts.size());
  for (auto& [word, count] : counts) {
    if (count >= options.min_count) ranked.emplace_back(word, count);
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  if (options.max_size && ranked.size() > *options.max_size) ranked.resize(*options.max_size);
  std::vector<std::string> words;
  std::vector<std::size_t> freq;
  words.reserve(ranked.size());
  freq.reserve(ranked.size());
  for (auto& [word, count] : ranked) {
    words.push_back(std::move(word));
    freq.push_back(count);
  }
  return Vocabulary(std::move(words), std::move(freq));
}

Vocabulary build_vocabulary(const Corpus& corpus, const VocabularyOptions& options) {
  if (corpus.empty()) throw InputError("cannot build a vocabulary from an empty corpus");
  std::vector<std::vector<std::string>> docs;
  docs.reserve(corpus.size());
  for (const auto& doc : corpus) docs.push_back(options.tokenizer(doc.text));
  return build_vocabulary(docs, options);
}

TokenSequence encode_sequence(std::span<const std::string> tokens, const Vocabulary& vocab, std::size_t max_len) {
  TokenSequence seq;
  seq.indices.assign(max_len, kPadding);
  for (std::size_t pos = 0; pos < tokens.size() && seq.true_length < max_len; ++pos) {
    if (const auto id = vocab.find(tokens[pos])) {
      seq.indices[seq.true_length++] = *id;
      seq.source_positions.push_back(pos);
    }
  }
  return seq;
}

}  // namespace fakenews
