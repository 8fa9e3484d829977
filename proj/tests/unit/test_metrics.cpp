#include <gtest/gtest.h>

#include "fakenews/metrics.hpp"
#include "fakenews/rng.hpp"
#include "../oracles/confusion.hpp"

namespace fakenews {
namespace {

std::vector<Label> labels(const std::vector<bool>& fake) {
  std::vector<Label> out;
  for (bool f : fake) out.push_back(f ? Label::Fake : Label::Real);
  return out;
}

TEST(Metrics, WorkedExample) {
  // tp=3 fp=1 tn=4 fn=2
  const auto m = compute_metrics(Confusion{3, 1, 4, 2});
  EXPECT_DOUBLE_EQ(m.accuracy, 0.7);
  EXPECT_DOUBLE_EQ(*m.fake_accuracy, 0.6);
  EXPECT_DOUBLE_EQ(*m.real_accuracy, 0.8);
  EXPECT_DOUBLE_EQ(*m.f1_fake, 6.0 / 9.0);
  EXPECT_DOUBLE_EQ(*m.f1_real, 8.0 / 11.0);
  EXPECT_DOUBLE_EQ(m.f1, (6.0 / 9.0 + 8.0 / 11.0) / 2.0);
}

TEST(Metrics, EverythingPredictedFake) {
  const auto m = compute_metrics(Confusion{.tp = 5, .fp = 5});
  EXPECT_DOUBLE_EQ(*m.real_accuracy, 0.0);
  EXPECT_DOUBLE_EQ(*m.fake_accuracy, 1.0);
  EXPECT_DOUBLE_EQ(*m.f1_real, 0.0);
  EXPECT_EQ(format_ratio(m.real_accuracy), "0.000");
}

TEST(Metrics, UndefinedRatiosStayEmpty) {
  const auto m = compute_metrics(Confusion{.tn = 4});
  EXPECT_FALSE(m.fake_accuracy.has_value());
  EXPECT_FALSE(m.f1_fake.has_value());
  EXPECT_DOUBLE_EQ(m.f1, 1.0);
  EXPECT_EQ(format_ratio(m.fake_accuracy), "n/a");
  EXPECT_TRUE(to_json(m)["fake_accuracy"].is_null());
  EXPECT_THROW(compute_metrics(Confusion{}), InputError);
}

TEST(Metrics, MatchBruteForceOracleExactly) {
  Rng rng(42, "metrics-oracle");
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng.below(60);
    std::vector<bool> truth(n), pred(n);
    const int mode = trial % 5;  // a share of degenerate single-class cases
    for (std::size_t i = 0; i < n; ++i) {
      truth[i] = mode == 3 ? true : rng.uniform() < 0.4;
      pred[i] = mode == 1 ? true : mode == 2 ? false : rng.uniform() < 0.5;
    }
    const auto got = compute_metrics(labels(truth), labels(pred));
    const auto want = oracle::brute_metrics(truth, pred);
    ASSERT_EQ(got.accuracy, want.accuracy) << trial;
    ASSERT_EQ(got.fake_accuracy, want.fake_recall) << trial;
    ASSERT_EQ(got.real_accuracy, want.real_recall) << trial;
    ASSERT_EQ(got.f1_fake, want.fake_f1) << trial;
    ASSERT_EQ(got.f1_real, want.real_f1) << trial;
    ASSERT_EQ(got.f1, want.macro_f1) << trial;
  }
}

TEST(Evaluate, ThresholdsAtHalf) {
  std::vector<Document> docs(3);
  docs[0].id = "a";
  docs[0].text = "x";
  docs[0].label = Label::Fake;
  docs[1].id = "b";
  docs[1].text = "y";
  docs[1].label = Label::Real;
  docs[2].id = "c";
  docs[2].text = "z";
  docs[2].label = Label::Real;
  const Corpus c("c", docs);
  const auto m = evaluate([](const Document& d) { return d.id == "c" ? 0.5 : (d.id == "a" ? 0.9 : 0.1); }, c);
  EXPECT_EQ(m.confusion, (Confusion{.tp = 1, .fp = 1, .tn = 1}));
  EXPECT_THROW(evaluate([](const Document&) { return std::nan(""); }, c), Error);
  EXPECT_THROW(evaluate([](const Document&) { return 0.0; }, Corpus{}), InputError);
}

TEST(MeanMetrics, SkipsUndefinedRuns) {
  const std::vector<Metrics> runs{compute_metrics(Confusion{.tn = 2}), compute_metrics(Confusion{1, 0, 1, 1})};
  const auto m = mean_metrics(runs);
  EXPECT_EQ(m.runs, 2u);
  EXPECT_DOUBLE_EQ(m.accuracy, (1.0 + 2.0 / 3.0) / 2.0);
  EXPECT_DOUBLE_EQ(*m.fake_accuracy, 0.5);
}

}  // namespace
}  // namespace fakenews
