#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "fakenews/corpus.hpp"
#include "fakenews/vocabulary.hpp"

namespace fakenews {

/// Sparse vector keyed by vocabulary index (1..V), sorted by index, without
/// explicit zeros.
class SparseVector {
 public:
  using Entry = std::pair<TokenId, double>;

  SparseVector() = default;
  /// Sorts, merges duplicate indices and drops zeros.
  explicit SparseVector(std::vector<Entry> entries);

  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t nnz() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  double get(TokenId index) const;
  double squared_norm() const;
  double norm() const;
  bool all_finite() const;

 private:
  std::vector<Entry> entries_;
};

/// Inverse document frequencies over a fitted vocabulary.
class TfIdfModel {
 public:
  TfIdfModel() = default;
  TfIdfModel(Vocabulary vocabulary, std::vector<double> idf, std::size_t document_count,
             TokenizerOptions tokenizer = {});

  const Vocabulary& vocabulary() const { return vocabulary_; }
  /// idf()[i] belongs to vocabulary index i + 1.
  const std::vector<double>& idf() const { return idf_; }
  std::size_t document_count() const { return document_count_; }
  const TokenizerOptions& tokenizer() const { return tokenizer_; }

  nlohmann::json to_json() const;
  static TfIdfModel from_json(const nlohmann::json& j);

 private:
  Vocabulary vocabulary_;
  std::vector<double> idf_;
  std::size_t document_count_ = 0;
  TokenizerOptions tokenizer_;
};

/// idf[t] = ln((1 + N) / (1 + df(t))) + 1.
TfIdfModel fit_tfidf(std::span<const std::vector<std::string>> train_documents, const Vocabulary& vocab,
                     TokenizerOptions tokenizer = {});
TfIdfModel fit_tfidf(const Corpus& train, const Vocabulary& vocab, TokenizerOptions tokenizer = {});

/// count(t) * idf[t], L2-normalized. OOV tokens ignored; no truncation. A
/// document with no vocabulary terms maps to the empty vector.
SparseVector transform_tfidf(std::span<const std::string> tokens, const TfIdfModel& model);
SparseVector transform_tfidf(const Document& doc, const TfIdfModel& model);

}  // namespace fakenews
