#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fakenews/common.hpp"
#include "fakenews/tfidf.hpp"

namespace fakenews {

enum class LinearKind : std::uint8_t { Logistic, PassiveAggressive };

std::string_view to_string(LinearKind kind);

/// Dense linear scorer over TF-IDF features. weights[i] belongs to
/// vocabulary index i + 1.
struct LinearModel {
  LinearKind kind = LinearKind::Logistic;
  std::vector<double> weights;
  double bias = 0.0;
  /// seed, epochs and hyperparameters used for training.
  nlohmann::json training_meta = nlohmann::json::object();

  /// w.x + b. Throws InputError if x references an index beyond weights.
  double score(const SparseVector& x) const;
  bool all_finite() const;
};

/// For PassiveAggressive the probability is an uncalibrated sigmoid of the
/// margin; only the 0.5 decision boundary is meaningful.
double predict_proba(const LinearModel& model, const SparseVector& x);

struct LogisticConfig {
  std::size_t epochs = 20;
  double lr = 0.05;
  double l2 = 1e-4;
  std::uint64_t seed = 1;
  /// Epoch e (0-based) uses lr / sqrt(e + 1).
  bool decay = true;
};

/// Minimizes mean binary cross-entropy + (l2 / 2) ||w||^2 (bias not
/// regularized) by SGD over a seeded per-epoch shuffle. Fake = 1.
LinearModel train_logistic(std::span<const SparseVector> x, std::span<const Label> y, std::size_t dim,
                           const LogisticConfig& config);

/// The objective minimized by train_logistic, and its exact gradient.
double logistic_objective(const LinearModel& model, std::span<const SparseVector> x, std::span<const Label> y,
                          double l2);
struct LinearGradient {
  std::vector<double> weights;
  double bias = 0.0;
};
LinearGradient logistic_gradient(const LinearModel& model, std::span<const SparseVector> x, std::span<const Label> y,
                                 double l2);

struct PassiveAggressiveConfig {
  double c = 1.0;
  std::size_t epochs = 5;
  std::uint64_t seed = 1;
  /// Treat the bias as a weight on a constant feature of 1.
  bool fit_intercept = false;
};

/// PA-I: tau = min(C, hinge / ||x||^2), w += tau * y * x with y in {-1, +1}.
/// Zero vectors with positive hinge loss are skipped and counted in
/// training_meta["skipped_zero_vectors"].
LinearModel train_passive_aggressive(std::span<const SparseVector> x, std::span<const Label> y, std::size_t dim,
                                     const PassiveAggressiveConfig& config);

/// A trained linear model together with the TF-IDF encoder it was fitted on.
struct LinearArtifact {
  TfIdfModel tfidf;
  LinearModel model;

  double predict_proba(const Document& doc) const;
  double predict_proba_text(std::string_view text) const;

  /// Versioned JSON; doubles are stored as hex floats so the file
  /// round-trips exactly.
  nlohmann::json to_json() const;
  static LinearArtifact from_json(const nlohmann::json& j);
};

void save_linear(const LinearArtifact& artifact, const std::filesystem::path& path);
LinearArtifact load_linear(const std::filesystem::path& path);

}  // namespace fakenews
