#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "fakenews/corpus.hpp"
#include "fakenews/vocabulary.hpp"

namespace fakenews {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// (V + 1) x D word vectors; row 0 is the padding vector and always zero.
class EmbeddingMatrix {
 public:
  EmbeddingMatrix() = default;
  /// Throws InputError if row 0 is non-zero or any entry is non-finite.
  EmbeddingMatrix(RowMatrix rows, std::string vocab_hash);

  const RowMatrix& rows() const { return rows_; }
  std::size_t dim() const { return static_cast<std::size_t>(rows_.cols()); }
  /// Number of words, excluding the padding row.
  std::size_t vocab_size() const { return rows_.rows() == 0 ? 0 : static_cast<std::size_t>(rows_.rows() - 1); }
  const std::string& vocab_hash() const { return vocab_hash_; }

  /// Binary serialization: magic, version, V, D, vocabulary SHA-256, then
  /// row-major little-endian doubles.
  std::string serialize() const;
  static EmbeddingMatrix deserialize(std::string_view bytes, const std::string& expected_vocab_hash,
                                     const std::string& what = "embedding");
  /// SHA-256 of serialize().
  std::string content_hash() const;

 private:
  RowMatrix rows_;
  std::string vocab_hash_;
};

struct Word2VecConfig {
  std::size_t dim = 100;
  std::size_t window = 5;
  std::size_t negatives = 5;
  std::size_t epochs = 5;
  double lr = 0.025;
  std::uint64_t seed = 1;
  /// Frequent-word subsampling threshold; 0 disables it.
  double subsample = 0.0;
};

/// Skip-gram with negative sampling; noise ~ unigram^0.75, learning rate
/// decays linearly to zero. Single-threaded and deterministic given seed.
/// Each sentence is a sequence of vocabulary indices (no padding).
EmbeddingMatrix train_word2vec(std::span<const std::vector<TokenId>> sentences, const Vocabulary& vocab,
                               const Word2VecConfig& config);
EmbeddingMatrix train_word2vec(const Corpus& corpus, const Vocabulary& vocab, const Word2VecConfig& config,
                               const TokenizerOptions& tokenizer = {});

/// Loss and gradients of one (center, context) pair with its negatives:
/// -log s(c.u_o) - sum_k log s(-c.u_k).
struct SkipGramGradient {
  double loss = 0.0;
  Eigen::VectorXd d_center;
  Eigen::VectorXd d_context;
  std::vector<Eigen::VectorXd> d_negatives;
};

SkipGramGradient skipgram_pair_gradient(const Eigen::VectorXd& center, const Eigen::VectorXd& context,
                                        std::span<const Eigen::VectorXd> negatives);

using Neighbor = std::pair<std::string, double>;

/// Cosine similarity ranking, excluding the query and the padding row.
std::vector<Neighbor> nearest_neighbors(const EmbeddingMatrix& matrix, const Vocabulary& vocab,
                                        std::string_view word, std::size_t k);

void save_embeddings(const EmbeddingMatrix& matrix, const std::filesystem::path& path);
/// Throws InputError on truncation or when the file was built for another vocabulary.
EmbeddingMatrix load_embeddings(const std::filesystem::path& path, const Vocabulary& vocab);

}  // namespace fakenews
