#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <variant>

#include <nlohmann/json.hpp>

#include "fakenews/corpus.hpp"
#include "fakenews/embedding.hpp"
#include "fakenews/linear.hpp"
#include "fakenews/lstm.hpp"

namespace fakenews {

enum class ModelKind : std::uint8_t { Logistic, PassiveAggressive, Lstm };

std::string_view to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view text);

/// Everything needed to train one model from a training corpus, except the
/// seed, which is supplied per run.
struct ModelConfig {
  ModelKind kind = ModelKind::Logistic;
  /// Linear models drop stopwords, the LSTM keeps them.
  bool remove_stopwords = true;
  std::optional<std::size_t> max_vocab;
  std::size_t min_count = 1;
  LogisticConfig logistic;
  PassiveAggressiveConfig passive_aggressive;
  Word2VecConfig word2vec;
  LstmConfig lstm;
  TrainConfig train;
  /// Share of the training corpus held out for LSTM epoch selection.
  double valid_fraction = 0.1;

  static ModelConfig defaults(ModelKind kind);
  /// Fully resolved form; seeds are omitted.
  nlohmann::json to_json() const;
  /// Strict: unknown keys are rejected. Absent keys take the defaults of
  /// the given kind.
  static ModelConfig from_json(const nlohmann::json& j, const std::string& where = "model");
};

/// A trained model of any kind.
class Classifier {
 public:
  explicit Classifier(LinearArtifact artifact) : model_(std::move(artifact)) {}
  explicit Classifier(LstmArtifact artifact) : model_(std::move(artifact)) {}

  ModelKind kind() const;
  double predict_proba(const Document& doc) const;
  double predict_proba_text(std::string_view text) const;

  const LinearArtifact* linear() const { return std::get_if<LinearArtifact>(&model_); }
  const LstmArtifact* lstm() const { return std::get_if<LstmArtifact>(&model_); }
  const nlohmann::json& training_meta() const;

  /// Exact bytes of the model file.
  std::string serialize() const;
  /// SHA-256 of serialize().
  std::string hash() const;

 private:
  std::variant<LinearArtifact, LstmArtifact> model_;
};

struct TrainedModel {
  Classifier classifier;
  /// Per-epoch history for the LSTM; null for linear models.
  nlohmann::json history;
};

using CorpusTransform = std::function<Corpus(const Corpus&)>;

/// Fits vocabulary, features and weights on `train` only. `expand` (e.g.
/// augmentation) is applied to the fitting data after the LSTM validation
/// slice has been held out, so no copy of a validation document is trained
/// on. `provenance` is stored in the model's training metadata.
TrainedModel train_classifier(const ModelConfig& config, const Corpus& train, std::uint64_t seed,
                              const nlohmann::json& provenance = nlohmann::json::object(),
                              const CorpusTransform& expand = {});

void save_classifier(const Classifier& classifier, const std::filesystem::path& path);
/// Detects the file kind from its first bytes.
Classifier load_classifier(const std::filesystem::path& path);

}  // namespace fakenews
