#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "fakenews/corpus.hpp"

namespace fakenews {

/// Counts with Fake as the positive class.
struct Confusion {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;

  void add(Label truth, Label predicted);
  std::size_t n() const { return tp + fp + tn + fn; }
  bool operator==(const Confusion&) const = default;
};

/// Ratios that would divide by zero are left empty, never reported as 0.
struct Metrics {
  Confusion confusion;
  std::size_t n = 0;
  double accuracy = 0.0;
  /// Mean of the per-class F1 scores that are defined.
  double f1 = 0.0;
  std::optional<double> f1_fake;
  std::optional<double> f1_real;
  std::optional<double> fake_accuracy;  // tp / (tp + fn)
  std::optional<double> real_accuracy;  // tn / (tn + fp)
};

/// Throws InputError on an empty confusion matrix.
Metrics compute_metrics(const Confusion& confusion);
Metrics compute_metrics(std::span<const Label> truth, std::span<const Label> predicted);

using PredictFn = std::function<double(const Document&)>;

/// Fake iff predict(doc) >= threshold. Throws InputError on an empty corpus
/// and Error if the predictor returns a non-finite probability.
Metrics evaluate(const PredictFn& predict, const Corpus& test, double threshold = 0.5);

/// Per-field means over repeated runs; an optional field is averaged over
/// the runs where it is defined.
struct MeanMetrics {
  std::size_t runs = 0;
  double accuracy = 0.0;
  double f1 = 0.0;
  std::optional<double> f1_fake;
  std::optional<double> fake_accuracy;
  std::optional<double> real_accuracy;
};

MeanMetrics mean_metrics(std::span<const Metrics> runs);

/// Three decimals, or "n/a".
std::string format_ratio(std::optional<double> value);

nlohmann::json to_json(const Metrics& metrics);
nlohmann::json to_json(const MeanMetrics& metrics);

}  // namespace fakenews
