#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "fakenews/augment.hpp"
#include "../support/synthetic.hpp"

namespace fakenews {
namespace {

SynonymLexicon lexicon() {
  return SynonymLexicon({{"big", {"large", "huge"}}, {"Car", {"auto", "car"}}, {"nothing", {"nothing"}}});
}

Document doc(std::string text) {
  Document d;
  d.id = "d";
  d.text = std::move(text);
  d.label = Label::Fake;
  return d;
}

TEST(Lexicon, NormalizesEntries) {
  const auto lex = lexicon();
  EXPECT_EQ(lex.size(), 2u);
  ASSERT_NE(lex.find("car"), nullptr);
  EXPECT_EQ(*lex.find("car"), (std::vector<std::string>{"auto"}));
  EXPECT_EQ(lex.find("nothing"), nullptr);
}

TEST(Lexicon, LoadsTsvAndReportsBadLines) {
  const auto dir = std::filesystem::temp_directory_path();
  const auto good = dir / "fakenews-lex-good.tsv";
  std::ofstream(good) << "# comment\nbig\tlarge,huge\n\nfast\tquick\n";
  EXPECT_EQ(load_lexicon(good).size(), 2u);
  const auto bad = dir / "fakenews-lex-bad.tsv";
  std::ofstream(bad) << "big\tlarge\nbroken line\n";
  try {
    load_lexicon(bad);
    FAIL();
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find(":2"), std::string::npos) << e.what();
  }
  std::filesystem::remove(good);
  std::filesystem::remove(bad);
}

TEST(AugmentDocument, ProbabilityExtremes) {
  const auto lex = lexicon();
  const auto d = doc("A BIG car, parked.");
  const auto same = augment_document(d, lex, 0.0, 1, "d#1");
  EXPECT_EQ(same.text, d.text);
  EXPECT_EQ(same.id, "d#1");
  EXPECT_EQ(same.label, d.label);
  const auto all = augment_document(d, lex, 1.0, 1, "d#1");
  const auto tokens = tokenize(clean_text(all.text));
  ASSERT_EQ(tokens.size(), 4u);
  EXPECT_TRUE(tokens[1] == "large" || tokens[1] == "huge");
  EXPECT_EQ(tokens[2], "auto");
  EXPECT_EQ(tokens[3], "parked");
  EXPECT_THROW(augment_document(d, lex, 1.5, 1, "x"), InputError);
}

TEST(AugmentDocument, TokenCountPreservedAndDeterministic) {
  const auto lex = lexicon();
  const auto d = doc("big big car big the car");
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto a = augment_document(d, lex, 0.5, seed, "x");
    EXPECT_EQ(tokenize(clean_text(a.text)).size(), 6u);
    EXPECT_EQ(a, augment_document(d, lex, 0.5, seed, "x"));
  }
}

TEST(AugmentCorpus, AppendsCopiesAfterEachDocument) {
  const auto c = with_role(synthetic::make_corpus({.fake = 3, .real = 3}), SplitRole::Train);
  const auto out = augment_corpus(c, lexicon(), {.copies_per_doc = 2}, 5);
  ASSERT_EQ(out.size(), 18u);
  EXPECT_EQ(out[0].id, c[0].id);
  EXPECT_EQ(out[1].label, c[0].label);
  EXPECT_EQ(out[3].id, c[1].id);
  EXPECT_EQ(out, augment_corpus(c, lexicon(), {.copies_per_doc = 2}, 5));
}

TEST(AugmentCorpus, RefusesTestSplit) {
  const auto c = with_role(synthetic::make_corpus({.fake = 3, .real = 3}), SplitRole::Test);
  EXPECT_THROW(augment_corpus(c, lexicon(), {}, 1), InputError);
}

}  // namespace
}  // namespace fakenews
