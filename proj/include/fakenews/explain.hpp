#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "fakenews/corpus.hpp"
#include "fakenews/lstm.hpp"

namespace fakenews {

enum class ExplainMethod : std::uint8_t { Lime, Intrinsic };

std::string_view to_string(ExplainMethod method);
ExplainMethod parse_explain_method(std::string_view text);

struct WordWeight {
  std::string token;
  /// Index into clean_tokens(doc.text). For LIME, the first occurrence.
  std::size_t position = 0;
  double weight = 0.0;
};

struct Explanation {
  std::string doc_id;
  Label predicted_label = Label::Real;
  double probability = 0.5;
  ExplainMethod method = ExplainMethod::Lime;
  /// Sorted by descending |weight|, ties by position.
  std::vector<WordWeight> word_weights;
  std::size_t top_k = 20;
  std::string model_hash;
  std::uint64_t seed = 0;
  std::optional<std::string> warning;

  /// The first min(top_k, size) entries of word_weights.
  std::vector<WordWeight> top() const;
  nlohmann::json to_json() const;
};

using TextPredictFn = std::function<double(std::string_view)>;

struct LimeOptions {
  std::size_t num_samples = 1000;
  double kernel_width = 0.75;
  std::size_t num_features = 10;
  double ridge = 1e-3;
  std::uint64_t seed = 1;
  /// Worker threads for the perturbation predictions.
  std::size_t jobs = 1;
};

/// Local linear surrogate over unique-word presence. Sample 0 is the
/// unmodified document; every other sample deletes a uniformly sized,
/// uniformly chosen non-empty set of words. Samples are weighted by
/// exp(-d^2 / width^2) with d the cosine distance to the full mask, and a
/// ridge regression with an unpenalized intercept is fitted. Throws
/// InputError if num_samples < 10 or the document has no tokens, and Error
/// if the predictor returns a non-finite value.
Explanation lime_explain(const TextPredictFn& predict, const Document& doc, const LimeOptions& options);

/// The LSTM's attention weights mapped onto document tokens. Weights are
/// non-negative and sum to 1; empty, with a warning, when no token is in
/// the vocabulary.
Explanation intrinsic_explain(const LstmArtifact& model, const Document& doc, std::size_t top_k = 20);

/// Self-contained HTML page: header, the shaded document text (each cleaned
/// token exactly once, in order) and a bar list of the top words. Output is
/// a pure function of the inputs.
std::string render_report(const Explanation& explanation, const Document& doc);
void write_report(const Explanation& explanation, const Document& doc, const std::filesystem::path& path);

}  // namespace fakenews
