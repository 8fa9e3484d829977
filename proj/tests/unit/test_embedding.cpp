#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "fakenews/embedding.hpp"
#include "fakenews/hash.hpp"
#include "fakenews/rng.hpp"
#include "../oracles/finite_difference.hpp"

namespace fakenews {
namespace {

using Eigen::VectorXd;

VectorXd random_vector(Rng& rng, int d) {
  VectorXd v(d);
  for (int i = 0; i < d; ++i) v[i] = rng.normal() * 0.5;
  return v;
}

TEST(SkipGram, PairGradientMatchesFiniteDifferences) {
  Rng rng(7);
  const int d = 6;
  VectorXd center = random_vector(rng, d);
  VectorXd context = random_vector(rng, d);
  std::vector<VectorXd> negatives{random_vector(rng, d), random_vector(rng, d), random_vector(rng, d)};
  const auto g = skipgram_pair_gradient(center, context, negatives);
  const auto loss = [&] { return skipgram_pair_gradient(center, context, negatives).loss; };
  double worst = 0.0;
  for (int i = 0; i < d; ++i) {
    worst = std::max(worst, oracle::relative_error(g.d_center[i], oracle::central_difference(loss, center[i])));
    worst = std::max(worst, oracle::relative_error(g.d_context[i], oracle::central_difference(loss, context[i])));
    for (std::size_t k = 0; k < negatives.size(); ++k) {
      worst = std::max(worst,
                       oracle::relative_error(g.d_negatives[k][i], oracle::central_difference(loss, negatives[k][i])));
    }
  }
  EXPECT_LT(worst, 1e-4);
}

TEST(SkipGram, LossValue) {
  const VectorXd c = VectorXd::Zero(3);
  const std::vector<VectorXd> neg{VectorXd::Ones(3)};
  // Both terms are -log(0.5).
  EXPECT_NEAR(skipgram_pair_gradient(c, VectorXd::Ones(3), neg).loss, 2.0 * std::log(2.0), 1e-15);
}

std::vector<std::vector<TokenId>> toy_sentences() {
  // Words 1/2 co-occur, words 3/4 co-occur.
  Rng rng(1);
  std::vector<std::vector<TokenId>> out;
  for (int s = 0; s < 200; ++s) {
    std::vector<TokenId> sent;
    const TokenId base = s % 2 == 0 ? 1 : 3;
    for (int t = 0; t < 10; ++t) sent.push_back(base + static_cast<TokenId>(rng.below(2)));
    out.push_back(sent);
  }
  return out;
}

TEST(Word2Vec, DeterministicAndPaddingRowZero) {
  const Vocabulary vocab({"a", "b", "c", "d"}, {500, 500, 500, 500});
  Word2VecConfig cfg{.dim = 8, .window = 2, .negatives = 2, .epochs = 3};
  const auto sentences = toy_sentences();
  const auto a = train_word2vec(sentences, vocab, cfg);
  const auto b = train_word2vec(sentences, vocab, cfg);
  EXPECT_EQ(a.rows(), b.rows());
  EXPECT_EQ(a.rows().rows(), 5);
  EXPECT_TRUE(a.rows().row(0).isZero(0.0));
  cfg.seed = 2;
  EXPECT_NE(train_word2vec(sentences, vocab, cfg).rows(), a.rows());
}

TEST(Word2Vec, ZeroEpochsKeepsInitialization) {
  const Vocabulary vocab({"a", "b", "c", "d"}, {1, 1, 1, 1});
  Word2VecConfig cfg{.dim = 4, .epochs = 0};
  const auto sentences = toy_sentences();
  const auto first = train_word2vec(sentences, vocab, cfg);
  const std::vector<std::vector<TokenId>> other{{4, 3, 2, 1}};
  EXPECT_EQ(first.rows(), train_word2vec(other, vocab, cfg).rows());
  EXPECT_THROW(train_word2vec(std::vector<std::vector<TokenId>>{{1}}, vocab, cfg), InputError);
}

TEST(Word2Vec, CooccurringWordsAreNeighbours) {
  const Vocabulary vocab({"a", "b", "c", "d"}, {500, 500, 500, 500});
  const auto m = train_word2vec(toy_sentences(), vocab, {.dim = 8, .window = 2, .negatives = 3, .epochs = 10});
  const auto nn = nearest_neighbors(m, vocab, "a", 3);
  ASSERT_EQ(nn.size(), 3u);
  EXPECT_EQ(nn[0].first, "b");
  EXPECT_THROW(nearest_neighbors(m, vocab, "zzz", 3), InputError);
}

TEST(Embedding, SaveLoadRoundTrip) {
  const Vocabulary vocab({"a", "b"});
  RowMatrix rows = RowMatrix::Zero(3, 2);
  rows << 0, 0, 0.1, -2, 3e-300, 7;
  const EmbeddingMatrix m(rows, vocab.hash());
  const auto path = std::filesystem::temp_directory_path() / "fakenews-embedding-test.bin";
  save_embeddings(m, path);
  const auto back = load_embeddings(path, vocab);
  EXPECT_EQ(back.rows(), m.rows());
  EXPECT_EQ(back.content_hash(), m.content_hash());
  EXPECT_THROW(load_embeddings(path, Vocabulary({"b", "a"})), InputError);
  const auto bytes = m.serialize();
  std::ofstream(path, std::ios::binary) << bytes.substr(0, bytes.size() - 3);
  EXPECT_THROW(load_embeddings(path, vocab), InputError);
  std::filesystem::remove(path);
}

TEST(Embedding, RejectsNonZeroPaddingRow) {
  RowMatrix rows = RowMatrix::Ones(2, 2);
  EXPECT_THROW(EmbeddingMatrix(rows, sha256_hex("x")), InputError);
}

}  // namespace
}  // namespace fakenews
