#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fakenews/augment.hpp"
#include "fakenews/classifier.hpp"
#include "fakenews/corpus.hpp"
#include "fakenews/metrics.hpp"

namespace fakenews {

/// Subset1 and Subset2 are the train and test sides of a fixed stratified
/// split of each named corpus.
enum class Subset : std::uint8_t { Full, Subset1, Subset2 };

struct CorpusSelector {
  std::vector<std::string> corpora;
  Subset subset = Subset::Full;

  /// "SA1", "US1 Subset1", "SA1 and US1 Subset2".
  std::string label() const;
  nlohmann::json to_json() const;
  /// Accepts {"corpora": [...], "subset": "full|subset1|subset2"} or the
  /// shorthand string "SA1+US1/subset1".
  static CorpusSelector from_json(const nlohmann::json& j, const std::string& where);
};

struct ExperimentSpec {
  /// Row label in the results table.
  std::string name;
  ModelConfig model;
  CorpusSelector train;
  CorpusSelector test;
  bool augment = false;
  AugmentOptions augment_options;
  /// Real documents per fake document in the training data; unset keeps the
  /// native ratio.
  std::optional<double> imbalance;
  std::size_t repetitions = 5;
  /// Fixes the split; run r trains with seed seed_base + r.
  std::uint64_t seed_base = 1;
  double test_fraction = 0.2;

  nlohmann::json to_json() const;
  /// Strict: unknown keys are rejected. Missing selectors stay empty and
  /// fail when resolved.
  static ExperimentSpec from_json(const nlohmann::json& j, const std::string& where = "experiment");
};

using CorpusRegistry = std::map<std::string, Corpus>;

struct ResolvedData {
  Corpus train;
  Corpus test;
};

/// Throws InputError for unknown corpora or when train and test overlap.
ResolvedData resolve_data(const ExperimentSpec& spec, const CorpusRegistry& corpora);
/// One selector on its own, as used for training-only or test-only runs.
Corpus resolve_selector(const CorpusSelector& selector, const ExperimentSpec& spec, const CorpusRegistry& corpora,
                        SplitRole role);

struct RunResult {
  std::uint64_t seed = 0;
  std::size_t train_size = 0;
  std::string model_hash;
  Metrics metrics;
};

struct ExperimentResult {
  ExperimentSpec spec;
  std::vector<RunResult> runs;
  MeanMetrics mean;
  double peak_accuracy = 0.0;
  nlohmann::json provenance = nlohmann::json::object();
  /// Set when the experiment could not finish; runs holds what completed.
  std::optional<std::string> error;

  nlohmann::json to_json() const;
};

/// `lexicon` is required when spec.augment is set. A diverging run stops the
/// experiment; completed runs are kept and `error` is set. Configuration
/// errors throw.
ExperimentResult run_experiment(const ExperimentSpec& spec, const CorpusRegistry& corpora,
                                const SynonymLexicon* lexicon = nullptr);

/// Runs every spec, up to `jobs` at a time, and returns results in spec
/// order. Errors are recorded per row instead of thrown.
std::vector<ExperimentResult> run_matrix(const std::vector<ExperimentSpec>& specs, const CorpusRegistry& corpora,
                                         const SynonymLexicon* lexicon = nullptr, std::size_t jobs = 1);

/// Columns: Model, Data Trained, Data Tested, Average Accuracy, F1 Score,
/// Per Class Accuracy.
std::string format_matrix(const std::vector<ExperimentResult>& results);
nlohmann::json matrix_to_json(const std::vector<ExperimentResult>& results);

/// The sixteen-row cross-corpus preset (see README).
std::vector<ExperimentSpec> reproduction_matrix(std::uint64_t seed_base = 1, std::size_t repetitions = 5);

}  // namespace fakenews
