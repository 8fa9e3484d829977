#include "fakenews/linear.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

#include "fakenews/hash.hpp"
#include "fakenews/rng.hpp"

namespace fakenews {
namespace {

constexpr std::string_view kFormat = "fakenews-linear";
constexpr int kFormatVersion = 1;

void check_inputs(std::span<const SparseVector> x, std::span<const Label> y, std::size_t dim) {
  if (x.empty()) throw InputError("training set is empty");
  if (x.size() != y.size()) throw InputError("feature and label counts differ");
  for (const auto& v : x) {
    if (!v.all_finite()) throw InputError("non-finite value in training features");
    if (!v.empty() && static_cast<std::size_t>(v.entries().back().first) > dim) {
      throw InputError("feature index exceeds model dimension");
    }
  }
}

std::vector<std::size_t> iota(std::size_t n) {
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  return order;
}

}  // namespace

std::string_view to_string(LinearKind kind) {
  return kind == LinearKind::Logistic ? "logistic" : "passive_aggressive";
}

double LinearModel::score(const SparseVector& x) const {
  double z = bias;
  for (const auto& [index, value] : x.entries()) {
    if (index < 1 || static_cast<std::size_t>(index) > weights.size()) {
      throw InputError("feature index " + std::to_string(index) + " outside model dimension " +
                       std::to_string(weights.size()));
    }
    z += weights[static_cast<std::size_t>(index) - 1] * value;
  }
  return z;
}

bool LinearModel::all_finite() const {
  return std::isfinite(bias) && std::all_of(weights.begin(), weights.end(), [](double w) { return std::isfinite(w); });
}

double predict_proba(const LinearModel& model, const SparseVector& x) { return sigmoid(model.score(x)); }

double logistic_objective(const LinearModel& model, std::span<const SparseVector> x, std::span<const Label> y,
                          double l2) {
  double loss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double z = model.score(x[i]);
    loss += softplus(z) - label_target(y[i]) * z;
  }
  double w2 = 0.0;
  for (const double w : model.weights) w2 += w * w;
  return loss / static_cast<double>(x.size()) + 0.5 * l2 * w2;
}

LinearGradient logistic_gradient(const LinearModel& model, std::span<const SparseVector> x, std::span<const Label> y,
                                 double l2) {
  LinearGradient grad;
  grad.weights.assign(model.weights.size(), 0.0);
  const double inv_n = 1.0 / static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double g = (sigmoid(model.score(x[i])) - label_target(y[i])) * inv_n;
    for (const auto& [index, value] : x[i].entries()) grad.weights[static_cast<std::size_t>(index) - 1] += g * value;
    grad.bias += g;
  }
  for (std::size_t j = 0; j < model.weights.size(); ++j) grad.weights[j] += l2 * model.weights[j];
  return grad;
}

LinearModel train_logistic(std::span<const SparseVector> x, std::span<const Label> y, std::size_t dim,
                           const LogisticConfig& config) {
  check_inputs(x, y, dim);
  if (!(config.lr >= 0.0) || !(config.l2 >= 0.0) || config.lr * config.l2 >= 1.0) {
    throw InputError("logistic: need lr >= 0, l2 >= 0 and lr * l2 < 1");
  }
  LinearModel model;
  model.kind = LinearKind::Logistic;
  model.training_meta = {{"seed", config.seed},
                         {"epochs", config.epochs},
                         {"hyperparameters", {{"lr", config.lr}, {"l2", config.l2}, {"decay", config.decay}}}};
  // w = scale * v, so the L2 shrink step is O(1) per example.
  std::vector<double> v(dim, 0.0);
  double scale = 1.0;
  double bias = 0.0;
  Rng rng(config.seed, "logistic-shuffle");
  auto order = iota(x.size());
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    const double lr = config.decay ? config.lr / std::sqrt(static_cast<double>(epoch + 1)) : config.lr;
    rng.shuffle(std::span(order));
    for (const std::size_t i : order) {
      double dot = 0.0;
      for (const auto& [index, value] : x[i].entries()) dot += v[static_cast<std::size_t>(index) - 1] * value;
      const double g = sigmoid(scale * dot + bias) - label_target(y[i]);
      scale *= 1.0 - lr * config.l2;
      const double step = lr * g / scale;
      for (const auto& [index, value] : x[i].entries()) v[static_cast<std::size_t>(index) - 1] -= step * value;
      bias -= lr * g;
      if (scale < 1e-9) {
        for (double& w : v) w *= scale;
        scale = 1.0;
      }
    }
  }
  model.weights.resize(dim);
  for (std::size_t j = 0; j < dim; ++j) model.weights[j] = scale * v[j];
  model.bias = bias;
  if (!model.all_finite()) throw TrainingError("logistic: training produced non-finite weights");
  return model;
}

LinearModel train_passive_aggressive(std::span<const SparseVector> x, std::span<const Label> y, std::size_t dim,
                                     const PassiveAggressiveConfig& config) {
  check_inputs(x, y, dim);
  if (!(config.c >= 0.0)) throw InputError("passive-aggressive: C must be non-negative");
  LinearModel model;
  model.kind = LinearKind::PassiveAggressive;
  model.weights.assign(dim, 0.0);
  std::size_t skipped = 0;
  Rng rng(config.seed, "pa-shuffle");
  auto order = iota(x.size());
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    rng.shuffle(std::span(order));
    for (const std::size_t i : order) {
      const double sign = y[i] == Label::Fake ? 1.0 : -1.0;
      const double loss = std::max(0.0, 1.0 - sign * model.score(x[i]));
      if (loss == 0.0) continue;
      const double norm2 = x[i].squared_norm() + (config.fit_intercept ? 1.0 : 0.0);
      if (norm2 == 0.0) {
        ++skipped;
        continue;
      }
      const double tau = std::min(config.c, loss / norm2);
      for (const auto& [index, value] : x[i].entries()) {
        model.weights[static_cast<std::size_t>(index) - 1] += tau * sign * value;
      }
      if (config.fit_intercept) model.bias += tau * sign;
    }
  }
  if (skipped > 0) {
    std::clog << "warning: passive-aggressive skipped " << skipped << " zero-vector updates\n";
  }
  model.training_meta = {{"seed", config.seed},
                         {"epochs", config.epochs},
                         {"hyperparameters", {{"C", config.c}, {"fit_intercept", config.fit_intercept}}},
                         {"skipped_zero_vectors", skipped}};
  if (!model.all_finite()) throw TrainingError("passive-aggressive: training produced non-finite weights");
  return model;
}

double LinearArtifact::predict_proba(const Document& doc) const {
  return fakenews::predict_proba(model, transform_tfidf(doc, tfidf));
}

double LinearArtifact::predict_proba_text(std::string_view text) const {
  const auto tokens = tfidf.tokenizer()(text);
  return fakenews::predict_proba(model, transform_tfidf(tokens, tfidf));
}

nlohmann::json LinearArtifact::to_json() const {
  nlohmann::json weights = nlohmann::json::array();
  for (const double w : model.weights) weights.push_back(hexfloat(w));
  return {{"format", kFormat},
          {"version", kFormatVersion},
          {"kind", to_string(model.kind)},
          {"V", model.weights.size()},
          {"vocabulary_hash", tfidf.vocabulary().hash()},
          {"seed", model.training_meta.value("seed", std::uint64_t{0})},
          {"training", model.training_meta},
          {"bias", hexfloat(model.bias)},
          {"weights", std::move(weights)},
          {"tfidf", tfidf.to_json()}};
}

LinearArtifact LinearArtifact::from_json(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != kFormat) throw InputError("not a linear model file");
    if (j.at("version").get<int>() != kFormatVersion) throw InputError("unsupported linear model version");
    LinearArtifact artifact;
    artifact.tfidf = TfIdfModel::from_json(j.at("tfidf"));
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "logistic") {
      artifact.model.kind = LinearKind::Logistic;
    } else if (kind == "passive_aggressive") {
      artifact.model.kind = LinearKind::PassiveAggressive;
    } else {
      throw InputError("unknown linear model kind '" + kind + "'");
    }
    for (const auto& w : j.at("weights")) artifact.model.weights.push_back(parse_hexfloat(w.get<std::string>()));
    artifact.model.bias = parse_hexfloat(j.at("bias").get<std::string>());
    artifact.model.training_meta = j.at("training");
    if (artifact.model.weights.size() != j.at("V").get<std::size_t>() ||
        artifact.model.weights.size() != artifact.tfidf.vocabulary().size()) {
      throw InputError("linear model dimension does not match its vocabulary");
    }
    if (j.at("vocabulary_hash").get<std::string>() != artifact.tfidf.vocabulary().hash()) {
      throw InputError("linear model vocabulary hash mismatch");
    }
    if (!artifact.model.all_finite()) throw InputError("linear model has non-finite parameters");
    return artifact;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed linear model: ") + e.what());
  }
}

void save_linear(const LinearArtifact& artifact, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << artifact.to_json().dump() << '\n';
  if (!out) throw Error("write failed: " + path.string());
}

LinearArtifact load_linear(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(path.string() + ": " + e.what());
  }
  return LinearArtifact::from_json(j);
}

}  // namespace fakenews
