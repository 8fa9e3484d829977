#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "fakenews/common.hpp"
#include "fakenews/text.hpp"

namespace fakenews {

struct Document {
  std::string id;
  std::string text;
  Label label = Label::Real;
  Source source = Source::Other;
  std::optional<std::string> title;
  std::optional<std::string> origin_url;

  bool operator==(const Document&) const = default;
};

/// Provenance of a corpus with respect to a train/test split. Augmentation
/// refuses corpora tagged Test.
enum class SplitRole : std::uint8_t { Full, Train, Test };

/// Immutable, ordered collection of labelled documents with unique ids.
class Corpus {
 public:
  Corpus() = default;
  /// Throws InputError on duplicate ids.
  Corpus(std::string name, std::vector<Document> documents, SplitRole role = SplitRole::Full);

  const std::string& name() const { return name_; }
  SplitRole role() const { return role_; }
  const std::vector<Document>& documents() const { return documents_; }
  std::size_t size() const { return documents_.size(); }
  bool empty() const { return documents_.empty(); }
  std::size_t count(Label label) const { return counts_[static_cast<std::size_t>(label)]; }
  const Document& operator[](std::size_t i) const { return documents_[i]; }

  auto begin() const { return documents_.begin(); }
  auto end() const { return documents_.end(); }

  bool operator==(const Corpus&) const = default;

 private:
  std::string name_;
  std::vector<Document> documents_;
  SplitRole role_ = SplitRole::Full;
  std::array<std::size_t, 2> counts_{0, 0};
};

enum class CorpusFormat : std::uint8_t { Csv, Jsonl, FlatDir };

struct LoadOptions {
  /// Name of the resulting corpus; defaults to the file stem.
  std::string name;
  bool allow_empty = false;
  /// Used when a record carries no source field.
  Source default_source = Source::Other;
  /// Used when a record carries no label field (e.g. single-class CSV dumps).
  std::optional<Label> default_label;
};

/// Directory -> FlatDir, ".csv" -> Csv, anything else -> Jsonl.
CorpusFormat infer_format(const std::filesystem::path& path);

/// Malformed records are reported as InputError with the file and line.
Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format, const LoadOptions& options = {});
Corpus load_corpus(const std::filesystem::path& path, const LoadOptions& options = {});

/// Canonical JSONL: {id, text, label, source, title?, origin_url?} per line.
std::string to_jsonl(const Corpus& corpus);
void save_jsonl(const Corpus& corpus, const std::filesystem::path& path);

/// SHA-256 (hex) of the canonical JSONL serialization.
std::string content_hash(const Corpus& corpus);

/// Concatenation; ids must stay unique.
Corpus concat(std::string name, const std::vector<const Corpus*>& parts, SplitRole role);

Corpus with_role(const Corpus& corpus, SplitRole role);

/// Per-corpus length summary. Lengths are counted in tokens of the cleaned text
/// (stopwords kept).
struct CorpusStats {
  std::size_t article_count = 0;
  double mean_len = 0.0;
  std::size_t min_len = 0;
  std::size_t max_len = 0;
  std::size_t above_mean = 0;  // strictly greater than mean_len
  std::size_t above_500 = 0;   // strictly greater than 500
  /// Per-article unique token counts summed over articles.
  std::size_t unique_tokens_total = 0;
  double unique_per_article_mean = 0.0;
  std::size_t unique_per_article_min = 0;
  std::size_t unique_per_article_max = 0;

  bool operator==(const CorpusStats&) const = default;
};

struct ClassStats {
  CorpusStats fake;
  CorpusStats real;
};

CorpusStats summarize(const Corpus& corpus);
ClassStats summarize_per_class(const Corpus& corpus);

/// Row names match the stats table printed by the CLI.
nlohmann::json stats_to_json(const CorpusStats& stats);
std::string format_stats_table(const std::vector<std::pair<std::string, CorpusStats>>& columns);

using WordCount = std::pair<std::string, std::size_t>;

/// Most frequent cleaned, stopword-filtered tokens; count descending, ties
/// lexicographic.
std::vector<WordCount> top_words(const Corpus& corpus, std::size_t n, const StopwordSet& stopwords);

struct CorpusSplit {
  Corpus train;
  Corpus test;
};

/// Deterministic given seed. Stratified splits draw round(fraction * n_c)
/// test documents from each class (at least one, leaving at least one).
CorpusSplit split(const Corpus& corpus, double test_fraction, std::uint64_t seed, bool stratified = true);

/// Subsamples to real_per_fake Real documents per Fake document. The class
/// that is the minority of the target ratio keeps all its documents (for a
/// 1:1 target, the smaller class); the other class is subsampled. Throws
/// InputError when that class has too few documents.
Corpus rebalance(const Corpus& corpus, double real_per_fake, std::uint64_t seed);

}  // namespace fakenews
