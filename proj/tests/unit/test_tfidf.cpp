#include <gtest/gtest.h>

#include <cmath>

#include "fakenews/tfidf.hpp"
#include "../oracles/dense_tfidf.hpp"
#include "../support/synthetic.hpp"

namespace fakenews {
namespace {

using Tokens = std::vector<std::string>;

TEST(SparseVector, MergesSortsAndDropsZeros) {
  const SparseVector v({{3, 1.0}, {1, 2.0}, {3, 1.5}, {2, 0.0}});
  ASSERT_EQ(v.nnz(), 2u);
  EXPECT_EQ(v.entries()[0].first, 1);
  EXPECT_DOUBLE_EQ(v.get(3), 2.5);
  EXPECT_DOUBLE_EQ(v.get(2), 0.0);
  EXPECT_DOUBLE_EQ(v.norm(), std::sqrt(4.0 + 6.25));
}

TEST(TfIdf, IdfFormula) {
  const std::vector<Tokens> train{{"a", "b"}, {"a"}, {"a", "c"}};
  const auto vocab = build_vocabulary(train);
  const auto model = fit_tfidf(train, vocab);
  EXPECT_DOUBLE_EQ(model.idf()[*vocab.find("a") - 1], std::log(4.0 / 4.0) + 1.0);
  EXPECT_DOUBLE_EQ(model.idf()[*vocab.find("b") - 1], std::log(4.0 / 2.0) + 1.0);
  EXPECT_EQ(model.document_count(), 3u);
}

TEST(TfIdf, UnitNormAndEmptyForOovDocs) {
  const std::vector<Tokens> train{{"a", "b", "b"}, {"c"}};
  const auto model = fit_tfidf(train, build_vocabulary(train));
  EXPECT_NEAR(transform_tfidf(train[0], model).norm(), 1.0, 1e-15);
  EXPECT_TRUE(transform_tfidf(Tokens{"zzz"}, model).empty());
  EXPECT_TRUE(transform_tfidf(Tokens{}, model).empty());
}

TEST(TfIdf, MatchesDenseOracle) {
  const auto train = synthetic::random_token_docs(200, 60, 40, 11);
  const auto test = synthetic::random_token_docs(50, 80, 40, 12);
  const auto vocab = build_vocabulary(train);
  const auto model = fit_tfidf(train, vocab);
  const auto dense_train = oracle::dense_tfidf(train, train, vocab.words());
  const auto dense_test = oracle::dense_tfidf(train, test, vocab.words());
  for (std::size_t j = 0; j < vocab.size(); ++j) {
    EXPECT_NEAR(model.idf()[j], dense_train.idf[j], 1e-12);
  }
  const auto compare = [&](const std::vector<Tokens>& docs, const oracle::DenseTfIdf& dense) {
    for (std::size_t i = 0; i < docs.size(); ++i) {
      const auto v = transform_tfidf(docs[i], model);
      for (std::size_t j = 0; j < vocab.size(); ++j) {
        ASSERT_NEAR(v.get(static_cast<TokenId>(j + 1)), dense.rows[i][j], 1e-12) << "doc " << i << " term " << j;
      }
    }
  };
  compare(train, dense_train);
  compare(test, dense_test);
}

TEST(TfIdf, JsonRoundTrip) {
  const std::vector<Tokens> train{{"a", "b"}, {"b"}};
  const auto model = fit_tfidf(train, build_vocabulary(train));
  const auto back = TfIdfModel::from_json(model.to_json());
  EXPECT_EQ(back.idf(), model.idf());
  EXPECT_EQ(back.vocabulary(), model.vocabulary());
}

}  // namespace
}  // namespace fakenews
