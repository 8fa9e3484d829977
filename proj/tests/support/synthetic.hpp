#pragma once

#include <string>
#include <vector>

#include "fakenews/corpus.hpp"
#include "fakenews/rng.hpp"

// Deterministic toy corpora. Each class has its own marker words mixed into
// shared filler, so a bag-of-words model can separate them.

namespace synthetic {

struct Options {
  std::size_t fake = 50;
  std::size_t real = 50;
  std::size_t min_len = 20;
  std::size_t max_len = 60;
  /// Share of tokens drawn from the class markers.
  double signal = 0.3;
  std::uint64_t seed = 1;
  std::string name = "toy";
};

inline const std::vector<std::string>& fake_markers() {
  static const std::vector<std::string> words{"shocking", "secret", "exposed", "miracle", "hoax",
                                              "conspiracy", "banned", "outrage", "leaked", "scandal"};
  return words;
}

inline const std::vector<std::string>& real_markers() {
  static const std::vector<std::string> words{"minister", "announced", "report", "council", "budget",
                                              "court", "police", "statement", "committee", "quarterly"};
  return words;
}

inline const std::vector<std::string>& filler() {
  static const std::vector<std::string> words{"the",   "a",     "of",    "and",   "to",     "in",    "people",
                                              "city",  "week",  "said",  "new",   "year",   "water", "road",
                                              "group", "local", "daily", "house", "market", "school"};
  return words;
}

inline fakenews::Corpus make_corpus(const Options& o) {
  fakenews::Rng rng(o.seed, "synthetic");
  std::vector<fakenews::Document> docs;
  const auto pick = [&](const std::vector<std::string>& words) { return words[rng.below(words.size())]; };
  const std::size_t total = o.fake + o.real;
  std::size_t made_fake = 0;
  for (std::size_t i = 0; i < total; ++i) {
    // Interleave the classes so prefixes stay mixed.
    const bool fake = made_fake < o.fake && (i % 2 == 0 || i - made_fake >= o.real);
    made_fake += fake ? 1 : 0;
    const std::size_t len = o.min_len + rng.below(o.max_len - o.min_len + 1);
    std::string text;
    for (std::size_t t = 0; t < len; ++t) {
      if (t > 0) text += ' ';
      text += rng.uniform() < o.signal ? pick(fake ? fake_markers() : real_markers()) : pick(filler());
    }
    fakenews::Document d;
    d.id = o.name + "-" + std::to_string(i);
    d.text = std::move(text);
    d.label = fake ? fakenews::Label::Fake : fakenews::Label::Real;
    docs.push_back(std::move(d));
  }
  return fakenews::Corpus(o.name, std::move(docs));
}

/// Random documents over a small alphabet of words, for property checks.
inline std::vector<std::vector<std::string>> random_token_docs(std::size_t n, std::size_t vocab, std::size_t max_len,
                                                               std::uint64_t seed) {
  fakenews::Rng rng(seed, "random-docs");
  std::vector<std::vector<std::string>> docs(n);
  for (auto& d : docs) {
    const std::size_t len = rng.below(max_len + 1);
    for (std::size_t t = 0; t < len; ++t) d.push_back("w" + std::to_string(rng.below(vocab)));
  }
  return docs;
}

}  // namespace synthetic
