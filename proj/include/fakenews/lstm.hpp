#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "fakenews/corpus.hpp"
#include "fakenews/embedding.hpp"
#include "fakenews/rng.hpp"
#include "fakenews/vocabulary.hpp"

namespace fakenews {

/// Layer sizes of the sequence classifier.
struct LstmConfig {
  std::size_t seq_len = kDefaultSequenceLength;
  std::size_t filters = 64;
  std::size_t kernel = 5;
  std::size_t pool = 4;
  std::size_t hidden1 = 64;
  std::size_t hidden2 = 32;
  std::size_t dense1 = 32;
  std::size_t dense2 = 16;
  double dropout = 0.3;
  /// Attention ignores pooled steps whose window holds only padding.
  bool mask_padding = true;
  /// Bound on |cell state|; 0 disables it. With ReLU in place of tanh the
  /// cell is otherwise unbounded and long sequences blow up in training.
  double cell_clip = 10.0;

  std::size_t pooled_len() const { return seq_len / pool; }
  nlohmann::json to_json() const;
  static LstmConfig from_json(const nlohmann::json& j);
  void validate() const;
};

/// Gate blocks are stacked in the order input, forget, candidate, output.
struct LstmLayerParams {
  Eigen::MatrixXd w;  // 4H x input
  Eigen::MatrixXd u;  // 4H x H
  Eigen::VectorXd b;  // 4H
};

/// All trainable tensors. The same shape doubles as the gradient container.
struct LstmParams {
  Eigen::MatrixXd conv_w;  // F x (K * D), row f = filter f over a K x D window
  Eigen::VectorXd conv_b;
  LstmLayerParams lstm1;
  LstmLayerParams lstm2;
  Eigen::VectorXd attn_w;  // H2
  Eigen::MatrixXd dense1_w;
  Eigen::VectorXd dense1_b;
  Eigen::MatrixXd dense2_w;
  Eigen::VectorXd dense2_b;
  Eigen::MatrixXd dense3_w;  // 1 x D2
  Eigen::VectorXd dense3_b;  // 1

  /// Named views of every tensor, in serialization order.
  std::vector<std::pair<const char*, Eigen::Map<Eigen::MatrixXd>>> tensors();
  std::vector<std::pair<const char*, Eigen::Map<const Eigen::MatrixXd>>> tensors() const;

  /// Same shapes, all zero.
  LstmParams zeros_like() const;
  void set_zero();
  bool all_finite() const;
  double squared_norm() const;
  void scale(double factor);
  void add_scaled(const LstmParams& other, double factor);
};

/// Everything backward() needs from one forward pass.
struct ForwardCache {
  std::size_t true_length = 0;
  std::size_t steps = 0;        // pooled steps actually run
  std::vector<bool> valid;      // per pooled step, attention mask
  Eigen::MatrixXd im2col;       // (steps * P) x (K * D)
  Eigen::MatrixXd conv_pre;     // (steps * P) x F
  Eigen::MatrixXd pooled;       // steps x F
  Eigen::MatrixXi argmax;       // steps x F, token position of the window maximum
  bool uniform_attention = false;  // no valid step: fixed uniform weights
  struct Layer {
    Eigen::MatrixXd input;      // steps x In
    Eigen::MatrixXd gates;      // steps x 4H, post-activation
    Eigen::MatrixXd gate_pre;   // steps x 4H
    Eigen::MatrixXd cell;       // steps x H
    Eigen::MatrixXd hidden;     // steps x H
  } l1, l2;
  Eigen::VectorXd attention;    // steps
  Eigen::VectorXd context;      // H2
  Eigen::VectorXd pre1, act1, pre2, act2;
  double logit = 0.0;
};

struct ForwardResult {
  double probability = 0.5;
  /// Attention weight per pooled step (pooled_len() entries; steps that were
  /// not run carry 0).
  Eigen::VectorXd attention;
  ForwardCache cache;
};

struct TokenContribution {
  std::size_t position = 0;  // index into the encoded sequence
  double weight = 0.0;
};

/// Conv + LSTM + attention-over-time classifier over a frozen embedding.
class LstmNetwork {
 public:
  LstmNetwork() = default;
  /// Glorot-uniform kernels, orthogonal recurrent weights, forget bias 1.
  LstmNetwork(LstmConfig config, std::shared_ptr<const EmbeddingMatrix> embedding, std::uint64_t seed);
  LstmNetwork(LstmConfig config, std::shared_ptr<const EmbeddingMatrix> embedding, LstmParams params);

  const LstmConfig& config() const { return config_; }
  const EmbeddingMatrix& embedding() const { return *embedding_; }
  std::shared_ptr<const EmbeddingMatrix> embedding_ptr() const { return embedding_; }
  const LstmParams& params() const { return params_; }
  LstmParams& params() { return params_; }

 private:
  LstmConfig config_;
  std::shared_ptr<const EmbeddingMatrix> embedding_;
  LstmParams params_;
};

/// embed -> dropout (train_mode only, inverted) -> conv1d 'same' + ReLU ->
/// max-pool -> LSTM -> LSTM -> attention softmax over time -> dense ReLU ->
/// dense ReLU -> dense sigmoid. `rng` is required when train_mode is set and
/// dropout is non-zero. Throws InputError if the sequence length is wrong.
ForwardResult forward(const LstmNetwork& net, const TokenSequence& seq, bool train_mode, Rng* rng = nullptr);

/// Gradients of binary cross-entropy with respect to every trainable tensor.
/// The embedding is frozen and receives none.
LstmParams backward(const LstmNetwork& net, const ForwardCache& cache, Label label);

/// Binary cross-entropy of a cached forward pass.
double bce_loss(const ForwardCache& cache, Label label);

double predict_proba(const LstmNetwork& net, const TokenSequence& seq);

/// Attention weight of each pooled step attributed to one token of its
/// window: the real token chosen as argmax by most filters (earliest on
/// ties). Padding is never attributed; weights sum to 1. Empty for an
/// all-padding sequence.
std::vector<TokenContribution> extract_token_contributions(const LstmNetwork& net, const TokenSequence& seq);

enum class Optimizer : std::uint8_t { Adam, SgdMomentum };

struct TrainConfig {
  std::size_t epochs = 10;
  std::size_t batch_size = 32;
  double lr = 1e-3;
  std::uint64_t seed = 1;
  Optimizer optimizer = Optimizer::Adam;
  double momentum = 0.9;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  /// Stop after this many epochs without validation improvement; 0 disables.
  std::size_t patience = 0;
  /// Global gradient-norm clip; 0 disables.
  double clip_norm = 5.0;

  nlohmann::json to_json() const;
  void validate() const;
};

struct TrainHistory {
  std::vector<double> train_loss;
  std::vector<double> train_accuracy;
  std::vector<double> valid_accuracy;
  std::size_t best_epoch = 0;
  std::size_t train_size = 0;

  nlohmann::json to_json() const;
};

struct EncodedSet {
  std::vector<TokenSequence> sequences;
  std::vector<Label> labels;

  std::size_t size() const { return sequences.size(); }
};

EncodedSet encode_corpus(const Corpus& corpus, const Vocabulary& vocab, std::size_t seq_len,
                         const TokenizerOptions& tokenizer = {});

struct TrainResult {
  LstmNetwork network;
  TrainHistory history;
};

/// Mini-batch training on binary cross-entropy; returns the weights of the
/// best validation epoch. Deterministic given cfg.seed. Throws TrainingError
/// if the loss or any parameter becomes non-finite.
TrainResult train(const LstmNetwork& initial, const EncodedSet& train_set, const EncodedSet& valid_set,
                  const TrainConfig& cfg);

/// A trained network together with the vocabulary that encodes its input.
struct LstmArtifact {
  Vocabulary vocabulary;
  TokenizerOptions tokenizer;
  LstmNetwork network;
  nlohmann::json training_meta = nlohmann::json::object();

  TokenSequence encode(std::string_view text) const;
  double predict_proba(const Document& doc) const;
  double predict_proba_text(std::string_view text) const;

  /// Versioned container: magic, version, JSON header (config, vocabulary,
  /// embedding hash, training metadata), then named little-endian f64 tensor
  /// blocks including the embedding.
  std::string serialize() const;
  static LstmArtifact deserialize(std::string_view bytes, const std::string& what = "lstm model");
};

void save_lstm(const LstmArtifact& artifact, const std::filesystem::path& path);
LstmArtifact load_lstm(const std::filesystem::path& path);

}  // namespace fakenews
