#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "fakenews/corpus.hpp"
#include "../support/synthetic.hpp"

namespace fakenews {
namespace {

namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir() : path_(fs::temp_directory_path() / ("fakenews-corpus-" + std::to_string(::getpid()) + "-" +
                                                 std::to_string(counter_++))) {
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }
  fs::path write(const std::string& name, const std::string& content) const {
    const auto p = path_ / name;
    fs::create_directories(p.parent_path());
    std::ofstream(p, std::ios::binary) << content;
    return p;
  }

 private:
  static inline int counter_ = 0;
  fs::path path_;
};

Document doc(std::string id, std::string text, Label label) {
  Document d;
  d.id = std::move(id);
  d.text = std::move(text);
  d.label = label;
  return d;
}

std::string words(std::size_t n) {
  std::string s;
  for (std::size_t i = 0; i < n; ++i) s += (i ? " w" : "w") + std::to_string(i % 7);
  return s;
}

TEST(Corpus, RejectsDuplicateIds) {
  EXPECT_THROW(Corpus("c", {doc("a", "x", Label::Fake), doc("a", "y", Label::Real)}), InputError);
}

TEST(Corpus, CountsLabels) {
  const Corpus c("c", {doc("a", "x", Label::Fake), doc("b", "y", Label::Real), doc("c", "z", Label::Real)});
  EXPECT_EQ(c.count(Label::Fake), 1u);
  EXPECT_EQ(c.count(Label::Real), 2u);
}

TEST(LoadCorpus, CsvWithQuotedFields) {
  TempDir dir;
  const auto p = dir.write("news.csv",
                           "id,title,text,label\n"
                           "1,\"A, title\",\"Body with \"\"quotes\"\"\nand newline\",FAKE\n"
                           "2,,Plain body,REAL\n");
  const auto c = load_corpus(p);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c.name(), "news");
  EXPECT_EQ(c[0].text, "Body with \"quotes\"\nand newline");
  EXPECT_EQ(c[0].title, "A, title");
  EXPECT_EQ(c[0].label, Label::Fake);
  EXPECT_FALSE(c[1].title.has_value());
  EXPECT_EQ(c[1].label, Label::Real);
}

TEST(LoadCorpus, BadLabelNamesLine) {
  TempDir dir;
  const auto p = dir.write("bad.csv", "id,text,label\n1,ok,fake\n2,hmm,maybe\n");
  try {
    load_corpus(p);
    FAIL() << "expected InputError";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("bad.csv:3"), std::string::npos) << e.what();
  }
}

TEST(LoadCorpus, JsonlRoundTrip) {
  TempDir dir;
  const auto p = dir.write("c.jsonl",
                           "{\"id\":\"a\",\"text\":\"one\",\"label\":\"fake\",\"source\":\"SA1\"}\n\n"
                           "{\"id\":7,\"text\":\"two\",\"label\":0,\"title\":\"T\"}\n");
  LoadOptions options;
  options.name = "x";
  const auto c = load_corpus(p, options);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[1].id, "7");
  EXPECT_EQ(c[1].label, Label::Real);
  const auto out = dir.path() / "out.jsonl";
  save_jsonl(c, out);
  const auto back = load_corpus(out, options);
  EXPECT_EQ(back, c);
  EXPECT_EQ(content_hash(back), content_hash(c));
}

TEST(LoadCorpus, JsonlMissingTextIsError) {
  TempDir dir;
  const auto p = dir.write("c.jsonl", "{\"id\":\"a\",\"label\":\"fake\"}\n");
  EXPECT_THROW(load_corpus(p), InputError);
  const auto q = dir.write("d.jsonl", "not json\n");
  EXPECT_THROW(load_corpus(q), InputError);
}

TEST(LoadCorpus, FlatDirectory) {
  TempDir dir;
  dir.write("root/fake/b.txt", "second fake");
  dir.write("root/fake/a.txt", "first fake");
  dir.write("root/real/a.txt", "a real one");
  dir.write("root/other/ignored.txt", "skip");
  const auto c = load_corpus(dir.path() / "root");
  ASSERT_EQ(c.size(), 3u);
  EXPECT_EQ(c[0].id, "fake/a.txt");
  EXPECT_EQ(c[0].text, "first fake");
  EXPECT_EQ(c.count(Label::Real), 1u);
}

TEST(LoadCorpus, MissingFileIsError) {
  EXPECT_THROW(load_corpus("/nonexistent/path.jsonl"), InputError);
}

TEST(Summarize, LengthsAndThresholds) {
  const Corpus c("c", {doc("a", words(400), Label::Fake), doc("b", words(600), Label::Real)});
  const auto s = summarize(c);
  EXPECT_EQ(s.article_count, 2u);
  EXPECT_DOUBLE_EQ(s.mean_len, 500.0);
  EXPECT_EQ(s.min_len, 400u);
  EXPECT_EQ(s.max_len, 600u);
  EXPECT_EQ(s.above_mean, 1u);
  EXPECT_EQ(s.above_500, 1u);
  EXPECT_EQ(s.unique_tokens_total, 14u);
  const auto per = summarize_per_class(c);
  EXPECT_EQ(per.fake.article_count, 1u);
  EXPECT_EQ(per.real.max_len, 600u);
}

TEST(Summarize, CountsCleanedTokens) {
  const Corpus c("c", {doc("a", "Hello, World!", Label::Fake)});
  EXPECT_EQ(summarize(c).max_len, 2u);
}

TEST(TopWords, OrderedByCountThenWord) {
  const Corpus c("c", {doc("a", "The zebra and the apple", Label::Fake), doc("b", "apple zebra mango", Label::Real)});
  const auto top = top_words(c, 3, default_stopwords());
  ASSERT_EQ(top.size(), 3u);
  EXPECT_EQ(top[0], (WordCount{"apple", 2}));
  EXPECT_EQ(top[1], (WordCount{"zebra", 2}));
  EXPECT_EQ(top[2], (WordCount{"mango", 1}));
}

TEST(Split, StratifiedDisjointAndDeterministic) {
  const auto c = synthetic::make_corpus({.fake = 30, .real = 70});
  const auto a = split(c, 0.2, 9);
  const auto b = split(c, 0.2, 9);
  EXPECT_EQ(a.train, b.train);
  EXPECT_EQ(a.test.count(Label::Fake), 6u);
  EXPECT_EQ(a.test.count(Label::Real), 14u);
  EXPECT_EQ(a.train.size() + a.test.size(), c.size());
  EXPECT_EQ(a.test.role(), SplitRole::Test);
  std::set<std::string> ids;
  for (const auto& d : a.train) ids.insert(d.id);
  for (const auto& d : a.test) EXPECT_FALSE(ids.contains(d.id));
  EXPECT_NE(split(c, 0.2, 10).test, a.test);
}

TEST(Split, RejectsBadFraction) {
  const auto c = synthetic::make_corpus({.fake = 5, .real = 5});
  EXPECT_THROW(split(c, 0.0, 1), InputError);
  EXPECT_THROW(split(c, 1.0, 1), InputError);
}

TEST(Rebalance, OneToOneSubsamplesMajority) {
  const auto c = synthetic::make_corpus({.fake = 20, .real = 50});
  const auto r = rebalance(c, 1.0, 3);
  EXPECT_EQ(r.count(Label::Fake), 20u);
  EXPECT_EQ(r.count(Label::Real), 20u);
  EXPECT_EQ(rebalance(c, 1.0, 3), r);
}

TEST(Rebalance, RatioAboveOneKeepsAllFake) {
  const auto c = synthetic::make_corpus({.fake = 20, .real = 50});
  const auto r = rebalance(c, 2.0, 3);
  EXPECT_EQ(r.count(Label::Fake), 20u);
  EXPECT_EQ(r.count(Label::Real), 40u);
}

TEST(Rebalance, ImpossibleRatioIsError) {
  const auto c = synthetic::make_corpus({.fake = 20, .real = 50});
  EXPECT_THROW(rebalance(c, 10.0, 3), InputError);
  EXPECT_THROW(rebalance(c, 0.0, 3), InputError);
}

TEST(Concat, KeepsOrderAndRejectsDuplicates) {
  const Corpus a("a", {doc("x", "1", Label::Fake)});
  const Corpus b("b", {doc("y", "2", Label::Real)});
  const auto c = concat("ab", {&a, &b}, SplitRole::Train);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[1].id, "y");
  EXPECT_THROW(concat("aa", {&a, &a}, SplitRole::Full), InputError);
}

}  // namespace
}  // namespace fakenews
