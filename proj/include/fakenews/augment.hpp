#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "fakenews/corpus.hpp"

namespace fakenews {

/// Single-word synonym table. No entry is empty and no word lists itself.
class SynonymLexicon {
 public:
  SynonymLexicon() = default;
  /// Lowercases, removes self-synonyms and duplicates, drops emptied entries.
  explicit SynonymLexicon(std::map<std::string, std::vector<std::string>> synonyms);

  const std::vector<std::string>* find(const std::string& word) const;
  std::size_t size() const { return synonyms_.size(); }
  bool empty() const { return synonyms_.empty(); }
  const std::map<std::string, std::vector<std::string>>& entries() const { return synonyms_; }

 private:
  std::map<std::string, std::vector<std::string>> synonyms_;
};

/// TSV, one `word<TAB>syn1,syn2,...` per line; '#' lines are comments.
/// Malformed lines raise InputError naming the line number.
SynonymLexicon load_lexicon(const std::filesystem::path& path);

struct AugmentOptions {
  std::size_t copies_per_doc = 1;
  double replace_prob = 0.2;
};

/// Replaces each token that has synonyms, independently with probability
/// replace_prob, by a uniformly chosen synonym. When something was replaced
/// the result carries the cleaned token stream as text; otherwise the text is
/// the input verbatim. Either way the cleaned token count is unchanged.
Document augment_document(const Document& doc, const SynonymLexicon& lexicon, double replace_prob,
                          std::uint64_t rng_seed, const std::string& new_id);

/// Each document followed by its copies; copy k of document d draws from the
/// stream derived from (seed, d.id, k). Throws InputError on a Test corpus.
Corpus augment_corpus(const Corpus& train, const SynonymLexicon& lexicon, const AugmentOptions& options,
                      std::uint64_t seed);

}  // namespace fakenews
