#include <gtest/gtest.h>

#include <filesystem>

#include "fakenews/linear.hpp"
#include "fakenews/rng.hpp"
#include "../oracles/finite_difference.hpp"
#include "../support/synthetic.hpp"

namespace fakenews {
namespace {

struct Dataset {
  std::vector<SparseVector> x;
  std::vector<Label> y;
};

Dataset random_dataset(std::size_t n, std::size_t dim, std::uint64_t seed) {
  Rng rng(seed, "linear-test");
  Dataset d;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<SparseVector::Entry> e;
    for (std::size_t j = 1; j <= dim; ++j) {
      if (rng.uniform() < 0.4) e.emplace_back(static_cast<TokenId>(j), rng.normal());
    }
    d.x.emplace_back(std::move(e));
    d.y.push_back(rng.uniform() < 0.5 ? Label::Fake : Label::Real);
  }
  return d;
}

TEST(Logistic, GradientMatchesFiniteDifferences) {
  const auto d = random_dataset(30, 8, 1);
  LinearModel m;
  Rng rng(2);
  for (int i = 0; i < 8; ++i) m.weights.push_back(rng.normal());
  m.bias = 0.3;
  const double l2 = 0.01;
  const auto g = logistic_gradient(m, d.x, d.y, l2);
  const auto f = [&] { return logistic_objective(m, d.x, d.y, l2); };
  double worst = 0.0;
  for (std::size_t i = 0; i < m.weights.size(); ++i) {
    worst = std::max(worst, oracle::relative_error(g.weights[i], oracle::central_difference(f, m.weights[i])));
  }
  worst = std::max(worst, oracle::relative_error(g.bias, oracle::central_difference(f, m.bias)));
  EXPECT_LT(worst, 1e-6);
}

TEST(Logistic, TrainingReducesObjectiveAndIsDeterministic) {
  const auto d = random_dataset(80, 10, 3);
  LogisticConfig cfg{.epochs = 30, .lr = 0.1, .l2 = 1e-3};
  const auto a = train_logistic(d.x, d.y, 10, cfg);
  const auto b = train_logistic(d.x, d.y, 10, cfg);
  EXPECT_EQ(a.weights, b.weights);
  EXPECT_EQ(a.bias, b.bias);
  LinearModel zero{.weights = std::vector<double>(10, 0.0)};
  EXPECT_LT(logistic_objective(a, d.x, d.y, 1e-3), logistic_objective(zero, d.x, d.y, 1e-3));
}

TEST(Logistic, RejectsBadInput) {
  const auto d = random_dataset(5, 4, 1);
  EXPECT_THROW(train_logistic(d.x, d.y, 2, {}), InputError);
  EXPECT_THROW(train_logistic({}, {}, 4, {}), InputError);
  EXPECT_THROW(train_logistic(d.x, std::span(d.y).first(3), 4, {}), InputError);
}

TEST(PassiveAggressive, SingleUpdateFollowsClosedForm) {
  const std::vector<SparseVector> x{SparseVector({{1, 2.0}})};
  const std::vector<Label> y{Label::Fake};
  // hinge = 1, ||x||^2 = 4, tau = min(C, 0.25)
  const auto m = train_passive_aggressive(x, y, 1, {.c = 1.0, .epochs = 1});
  EXPECT_DOUBLE_EQ(m.weights[0], 0.5);
  const auto capped = train_passive_aggressive(x, y, 1, {.c = 0.1, .epochs = 1});
  EXPECT_DOUBLE_EQ(capped.weights[0], 0.2);
}

TEST(PassiveAggressive, PassiveOnceMarginIsMet) {
  const std::vector<SparseVector> x{SparseVector({{1, 1.0}})};
  const std::vector<Label> y{Label::Real};
  const auto m = train_passive_aggressive(x, y, 1, {.c = 10.0, .epochs = 5});
  EXPECT_DOUBLE_EQ(m.weights[0], -1.0);
}

TEST(PassiveAggressive, ZeroVectorsAreSkippedAndCounted) {
  const std::vector<SparseVector> x{SparseVector{}, SparseVector({{1, 1.0}})};
  const std::vector<Label> y{Label::Fake, Label::Fake};
  const auto m = train_passive_aggressive(x, y, 1, {.epochs = 1});
  EXPECT_EQ(m.training_meta["skipped_zero_vectors"], 1);
  EXPECT_TRUE(m.all_finite());
}

TEST(LinearArtifact, SeparatesSyntheticCorpusAndRoundTrips) {
  const auto corpus = synthetic::make_corpus({.fake = 60, .real = 60});
  TokenizerOptions tok{.remove_stopwords = true};
  VocabularyOptions options;
  options.tokenizer = tok;
  const auto vocab = build_vocabulary(corpus, options);
  LinearArtifact art;
  art.tfidf = fit_tfidf(corpus, vocab, tok);
  std::vector<SparseVector> x;
  std::vector<Label> y;
  for (const auto& doc : corpus) {
    x.push_back(transform_tfidf(doc, art.tfidf));
    y.push_back(doc.label);
  }
  art.model = train_logistic(x, y, vocab.size(), {});
  std::size_t correct = 0;
  for (const auto& doc : corpus) correct += (art.predict_proba(doc) >= 0.5) == (doc.label == Label::Fake);
  EXPECT_GE(correct, 114u);

  const auto path = std::filesystem::temp_directory_path() / "fakenews-linear-test.json";
  save_linear(art, path);
  const auto back = load_linear(path);
  EXPECT_EQ(back.model.weights, art.model.weights);
  EXPECT_EQ(back.model.bias, art.model.bias);
  EXPECT_EQ(back.predict_proba_text("shocking secret"), art.predict_proba_text("shocking secret"));
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace fakenews
