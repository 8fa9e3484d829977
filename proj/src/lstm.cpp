#include "fakenews/lstm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "fakenews/binary_io.hpp"
#include "fakenews/hash.hpp"

namespace fakenews {
namespace {

using Eigen::ArrayXd;
using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::RowVectorXd;
using Eigen::VectorXd;

constexpr std::string_view kMagic{"FNLSTM\0\0", 8};
constexpr std::uint32_t kFileVersion = 1;

Index idx(std::size_t n) { return static_cast<Index>(n); }

MatrixXd glorot(Index rows, Index cols, double fan_in, double fan_out, Rng& rng) {
  const double limit = std::sqrt(6.0 / (fan_in + fan_out));
  MatrixXd m(rows, cols);
  for (Index c = 0; c < cols; ++c) {
    for (Index r = 0; r < rows; ++r) m(r, c) = rng.uniform(-limit, limit);
  }
  return m;
}

// rows x cols with orthonormal columns (rows >= cols).
MatrixXd orthogonal(Index rows, Index cols, Rng& rng) {
  MatrixXd a(rows, cols);
  for (Index c = 0; c < cols; ++c) {
    for (Index r = 0; r < rows; ++r) a(r, c) = rng.normal();
  }
  Eigen::HouseholderQR<MatrixXd> qr(a);
  MatrixXd q = qr.householderQ() * MatrixXd::Identity(rows, cols);
  const MatrixXd r = qr.matrixQR().topRows(cols).triangularView<Eigen::Upper>();
  for (Index c = 0; c < cols; ++c) {
    if (r(c, c) < 0) q.col(c) = -q.col(c);
  }
  return q;
}

LstmLayerParams init_layer(std::size_t input, std::size_t hidden, Rng& rng) {
  const Index h = idx(hidden);
  LstmLayerParams layer;
  layer.w = glorot(4 * h, idx(input), static_cast<double>(input), static_cast<double>(4 * hidden), rng);
  layer.u = orthogonal(4 * h, h, rng);
  layer.b = VectorXd::Zero(4 * h);
  layer.b.segment(h, h).setOnes();
  return layer;
}

double relu(double x) { return x > 0.0 ? x : 0.0; }

void lstm_forward(const LstmLayerParams& p, double clip, const MatrixXd& input, ForwardCache::Layer& out) {
  const Index steps = input.rows();
  const Index h = p.u.cols();
  out.input = input;
  out.gate_pre = input * p.w.transpose();
  out.gate_pre.rowwise() += p.b.transpose();
  out.gates.resize(steps, 4 * h);
  out.cell.resize(steps, h);
  out.hidden.resize(steps, h);
  RowVectorXd h_prev = RowVectorXd::Zero(h);
  RowVectorXd c_prev = RowVectorXd::Zero(h);
  for (Index t = 0; t < steps; ++t) {
    out.gate_pre.row(t).noalias() += h_prev * p.u.transpose();
    const auto a = out.gate_pre.row(t);
    auto g = out.gates.row(t);
    for (Index j = 0; j < h; ++j) {
      g(j) = sigmoid(a(j));
      g(h + j) = sigmoid(a(h + j));
      g(2 * h + j) = relu(a(2 * h + j));
      g(3 * h + j) = sigmoid(a(3 * h + j));
      double c = g(h + j) * c_prev(j) + g(j) * g(2 * h + j);
      if (clip > 0.0) c = std::clamp(c, -clip, clip);
      out.cell(t, j) = c;
      out.hidden(t, j) = g(3 * h + j) * relu(c);
    }
    h_prev = out.hidden.row(t);
    c_prev = out.cell.row(t);
  }
}

// Backpropagation through time. Returns the gradient with respect to the
// layer input; accumulates parameter gradients into `grad`.
MatrixXd lstm_backward(const LstmLayerParams& p, double clip, const ForwardCache::Layer& cache,
                       const MatrixXd& d_hidden, LstmLayerParams& grad) {
  const Index steps = cache.input.rows();
  const Index h = p.u.cols();
  MatrixXd d_pre(steps, 4 * h);
  RowVectorXd dh_next = RowVectorXd::Zero(h);
  RowVectorXd dc_next = RowVectorXd::Zero(h);
  for (Index t = steps - 1; t >= 0; --t) {
    const auto g = cache.gates.row(t);
    const auto a = cache.gate_pre.row(t);
    for (Index j = 0; j < h; ++j) {
      const double dh = d_hidden(t, j) + dh_next(j);
      const double c = cache.cell(t, j);
      const double c_prev = t > 0 ? cache.cell(t - 1, j) : 0.0;
      const double i = g(j);
      const double f = g(h + j);
      const double cand = g(2 * h + j);
      const double o = g(3 * h + j);
      const double d_o = dh * relu(c);
      double dc = dc_next(j) + (c > 0.0 ? dh * o : 0.0);
      if (clip > 0.0 && std::abs(c) >= clip) dc = 0.0;
      d_pre(t, j) = dc * cand * i * (1.0 - i);
      d_pre(t, h + j) = dc * c_prev * f * (1.0 - f);
      d_pre(t, 2 * h + j) = a(2 * h + j) > 0.0 ? dc * i : 0.0;
      d_pre(t, 3 * h + j) = d_o * o * (1.0 - o);
      dc_next(j) = dc * f;
    }
    dh_next.noalias() = d_pre.row(t) * p.u;
  }
  grad.w.noalias() += d_pre.transpose() * cache.input;
  if (steps > 1) {
    grad.u.noalias() += d_pre.bottomRows(steps - 1).transpose() * cache.hidden.topRows(steps - 1);
  }
  grad.b += d_pre.colwise().sum().transpose();
  return d_pre * p.w;
}

template <typename Params, typename MapT>
auto collect(Params& p) {
  std::vector<std::pair<const char*, MapT>> out;
  const auto add = [&](const char* name, auto& m) { out.emplace_back(name, MapT(m.data(), m.rows(), m.cols())); };
  add("conv_w", p.conv_w);
  add("conv_b", p.conv_b);
  add("lstm1_w", p.lstm1.w);
  add("lstm1_u", p.lstm1.u);
  add("lstm1_b", p.lstm1.b);
  add("lstm2_w", p.lstm2.w);
  add("lstm2_u", p.lstm2.u);
  add("lstm2_b", p.lstm2.b);
  add("attn_w", p.attn_w);
  add("dense1_w", p.dense1_w);
  add("dense1_b", p.dense1_b);
  add("dense2_w", p.dense2_w);
  add("dense2_b", p.dense2_b);
  add("dense3_w", p.dense3_w);
  add("dense3_b", p.dense3_b);
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Configuration

nlohmann::json LstmConfig::to_json() const {
  return {{"seq_len", seq_len}, {"filters", filters}, {"kernel", kernel},   {"pool", pool},
          {"hidden1", hidden1}, {"hidden2", hidden2}, {"dense1", dense1},   {"dense2", dense2},
          {"dropout", dropout}, {"mask_padding", mask_padding}, {"cell_clip", cell_clip}};
}

LstmConfig LstmConfig::from_json(const nlohmann::json& j) {
  LstmConfig c;
  c.seq_len = j.at("seq_len").get<std::size_t>();
  c.filters = j.at("filters").get<std::size_t>();
  c.kernel = j.at("kernel").get<std::size_t>();
  c.pool = j.at("pool").get<std::size_t>();
  c.hidden1 = j.at("hidden1").get<std::size_t>();
  c.hidden2 = j.at("hidden2").get<std::size_t>();
  c.dense1 = j.at("dense1").get<std::size_t>();
  c.dense2 = j.at("dense2").get<std::size_t>();
  c.dropout = j.at("dropout").get<double>();
  c.mask_padding = j.at("mask_padding").get<bool>();
  c.cell_clip = j.at("cell_clip").get<double>();
  c.validate();
  return c;
}

void LstmConfig::validate() const {
  if (seq_len == 0 || filters == 0 || kernel == 0 || pool == 0 || hidden1 == 0 || hidden2 == 0 || dense1 == 0 ||
      dense2 == 0) {
    throw InputError("lstm config: all sizes must be positive");
  }
  if (pool > seq_len) throw InputError("lstm config: pool window longer than the sequence");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw InputError("lstm config: dropout must be in [0, 1)");
  if (!(cell_clip >= 0.0) || !std::isfinite(cell_clip)) throw InputError("lstm config: cell_clip must be >= 0");
}

// ---------------------------------------------------------------------------
// Parameters

std::vector<std::pair<const char*, Eigen::Map<MatrixXd>>> LstmParams::tensors() {
  return collect<LstmParams, Eigen::Map<MatrixXd>>(*this);
}

std::vector<std::pair<const char*, Eigen::Map<const MatrixXd>>> LstmParams::tensors() const {
  return collect<const LstmParams, Eigen::Map<const MatrixXd>>(*this);
}

LstmParams LstmParams::zeros_like() const {
  LstmParams z = *this;
  z.set_zero();
  return z;
}

void LstmParams::set_zero() {
  for (auto& [name, t] : tensors()) t.setZero();
}

bool LstmParams::all_finite() const {
  for (const auto& [name, t] : tensors()) {
    if (!t.allFinite()) return false;
  }
  return true;
}

double LstmParams::squared_norm() const {
  double s = 0.0;
  for (const auto& [name, t] : tensors()) s += t.squaredNorm();
  return s;
}

void LstmParams::scale(double factor) {
  for (auto& [name, t] : tensors()) t *= factor;
}

void LstmParams::add_scaled(const LstmParams& other, double factor) {
  auto mine = tensors();
  const auto theirs = other.tensors();
  for (std::size_t i = 0; i < mine.size(); ++i) mine[i].second += factor * theirs[i].second;
}

// ---------------------------------------------------------------------------
// Network

LstmNetwork::LstmNetwork(LstmConfig config, std::shared_ptr<const EmbeddingMatrix> embedding, std::uint64_t seed)
    : config_(config), embedding_(std::move(embedding)) {
  config_.validate();
  if (!embedding_ || embedding_->dim() == 0) throw InputError("lstm: embedding matrix required");
  Rng rng(seed, "lstm-init");
  const double d = static_cast<double>(embedding_->dim());
  const double k = static_cast<double>(config_.kernel);
  const double f = static_cast<double>(config_.filters);
  params_.conv_w = glorot(idx(config_.filters), idx(config_.kernel * embedding_->dim()), k * d, k * f, rng);
  params_.conv_b = VectorXd::Zero(idx(config_.filters));
  params_.lstm1 = init_layer(config_.filters, config_.hidden1, rng);
  params_.lstm2 = init_layer(config_.hidden1, config_.hidden2, rng);
  params_.attn_w = glorot(idx(config_.hidden2), 1, static_cast<double>(config_.hidden2), 1.0, rng);
  params_.dense1_w = glorot(idx(config_.dense1), idx(config_.hidden2), static_cast<double>(config_.hidden2),
                            static_cast<double>(config_.dense1), rng);
  params_.dense1_b = VectorXd::Zero(idx(config_.dense1));
  params_.dense2_w = glorot(idx(config_.dense2), idx(config_.dense1), static_cast<double>(config_.dense1),
                            static_cast<double>(config_.dense2), rng);
  params_.dense2_b = VectorXd::Zero(idx(config_.dense2));
  params_.dense3_w = glorot(1, idx(config_.dense2), static_cast<double>(config_.dense2), 1.0, rng);
  params_.dense3_b = VectorXd::Zero(1);
}

LstmNetwork::LstmNetwork(LstmConfig config, std::shared_ptr<const EmbeddingMatrix> embedding, LstmParams params)
    : config_(config), embedding_(std::move(embedding)), params_(std::move(params)) {
  config_.validate();
  if (!embedding_ || embedding_->dim() == 0) throw InputError("lstm: embedding matrix required");
  const auto check = [](const auto& m, std::size_t rows, std::size_t cols, const char* name) {
    if (static_cast<std::size_t>(m.rows()) != rows || static_cast<std::size_t>(m.cols()) != cols) {
      throw InputError(std::string("lstm: tensor ") + name + " has the wrong shape");
    }
  };
  const auto& c = config_;
  check(params_.conv_w, c.filters, c.kernel * embedding_->dim(), "conv_w");
  check(params_.conv_b, c.filters, 1, "conv_b");
  check(params_.lstm1.w, 4 * c.hidden1, c.filters, "lstm1_w");
  check(params_.lstm1.u, 4 * c.hidden1, c.hidden1, "lstm1_u");
  check(params_.lstm1.b, 4 * c.hidden1, 1, "lstm1_b");
  check(params_.lstm2.w, 4 * c.hidden2, c.hidden1, "lstm2_w");
  check(params_.lstm2.u, 4 * c.hidden2, c.hidden2, "lstm2_u");
  check(params_.lstm2.b, 4 * c.hidden2, 1, "lstm2_b");
  check(params_.attn_w, c.hidden2, 1, "attn_w");
  check(params_.dense1_w, c.dense1, c.hidden2, "dense1_w");
  check(params_.dense1_b, c.dense1, 1, "dense1_b");
  check(params_.dense2_w, c.dense2, c.dense1, "dense2_w");
  check(params_.dense2_b, c.dense2, 1, "dense2_b");
  check(params_.dense3_w, 1, c.dense2, "dense3_w");
  check(params_.dense3_b, 1, 1, "dense3_b");
}

ForwardResult forward(const LstmNetwork& net, const TokenSequence& seq, bool train_mode, Rng* rng) {
  const auto& cfg = net.config();
  const auto& p = net.params();
  const auto& emb = net.embedding().rows();
  if (seq.indices.size() != cfg.seq_len) {
    throw InputError("lstm: expected a sequence of length " + std::to_string(cfg.seq_len) + ", got " +
                     std::to_string(seq.indices.size()));
  }
  const bool dropout = train_mode && cfg.dropout > 0.0;
  if (dropout && rng == nullptr) throw InputError("lstm: train-mode forward needs an rng for dropout");

  const Index seq_len = idx(cfg.seq_len);
  const Index pool = idx(cfg.pool);
  const Index pooled_len = idx(cfg.pooled_len());
  const Index kernel = idx(cfg.kernel);
  const Index dim = emb.cols();
  const Index left = (kernel - 1) / 2;

  ForwardResult result;
  ForwardCache& cache = result.cache;
  cache.true_length = seq.true_length;

  Index steps = pooled_len;
  if (cfg.mask_padding) {
    steps = std::min<Index>(pooled_len, (idx(seq.true_length) + pool - 1) / pool);
  }
  if (steps == 0) {
    steps = pooled_len;
    cache.uniform_attention = true;
  }
  cache.steps = static_cast<std::size_t>(steps);
  cache.valid.assign(cache.steps, true);

  // Embedded (and dropped-out) input rows needed by the conv windows.
  const Index conv_rows = steps * pool;
  const Index needed = std::min(seq_len, conv_rows + kernel - 1 - left);
  MatrixXd x(needed, dim);
  for (Index t = 0; t < needed; ++t) {
    const TokenId id = seq.indices[static_cast<std::size_t>(t)];
    if (id < 0 || id >= emb.rows()) throw InputError("lstm: token index outside the embedding");
    x.row(t) = emb.row(id);
  }
  if (dropout) {
    const double keep = 1.0 - cfg.dropout;
    for (Index t = 0; t < needed; ++t) {
      for (Index d = 0; d < dim; ++d) x(t, d) = rng->bernoulli(keep) ? x(t, d) / keep : 0.0;
    }
  }

  cache.im2col = MatrixXd::Zero(conv_rows, kernel * dim);
  for (Index t = 0; t < conv_rows; ++t) {
    for (Index k = 0; k < kernel; ++k) {
      const Index src = t - left + k;
      if (src >= 0 && src < needed) cache.im2col.block(t, k * dim, 1, dim) = x.row(src);
    }
  }
  cache.conv_pre = cache.im2col * p.conv_w.transpose();
  cache.conv_pre.rowwise() += p.conv_b.transpose();

  const Index filters = p.conv_w.rows();
  cache.pooled.resize(steps, filters);
  cache.argmax.resize(steps, filters);
  for (Index s = 0; s < steps; ++s) {
    for (Index f = 0; f < filters; ++f) {
      Index best = s * pool;
      double value = relu(cache.conv_pre(best, f));
      for (Index t = best + 1; t < (s + 1) * pool; ++t) {
        const double v = relu(cache.conv_pre(t, f));
        if (v > value) {
          value = v;
          best = t;
        }
      }
      cache.pooled(s, f) = value;
      cache.argmax(s, f) = static_cast<int>(best);
    }
  }

  lstm_forward(p.lstm1, cfg.cell_clip, cache.pooled, cache.l1);
  lstm_forward(p.lstm2, cfg.cell_clip, cache.l1.hidden, cache.l2);

  const VectorXd scores = cache.l2.hidden * p.attn_w;
  cache.attention.resize(steps);
  if (cache.uniform_attention) {
    cache.attention.setConstant(1.0 / static_cast<double>(steps));
  } else {
    const double top = scores.maxCoeff();
    cache.attention = (scores.array() - top).exp();
    cache.attention /= cache.attention.sum();
  }
  cache.context = cache.l2.hidden.transpose() * cache.attention;

  cache.pre1 = p.dense1_w * cache.context + p.dense1_b;
  cache.act1 = cache.pre1.cwiseMax(0.0);
  cache.pre2 = p.dense2_w * cache.act1 + p.dense2_b;
  cache.act2 = cache.pre2.cwiseMax(0.0);
  cache.logit = (p.dense3_w * cache.act2)(0) + p.dense3_b(0);

  result.probability = sigmoid(cache.logit);
  result.attention = VectorXd::Zero(pooled_len);
  result.attention.head(steps) = cache.attention;
  return result;
}

double bce_loss(const ForwardCache& cache, Label label) {
  return softplus(cache.logit) - label_target(label) * cache.logit;
}

LstmParams backward(const LstmNetwork& net, const ForwardCache& cache, Label label) {
  const auto& p = net.params();
  LstmParams g = p.zeros_like();

  const double dz = sigmoid(cache.logit) - label_target(label);
  g.dense3_w = dz * cache.act2.transpose();
  g.dense3_b(0) = dz;
  const VectorXd d_act2 = p.dense3_w.transpose() * dz;
  const VectorXd d_pre2 = (cache.pre2.array() > 0.0).select(d_act2, 0.0);
  g.dense2_w = d_pre2 * cache.act1.transpose();
  g.dense2_b = d_pre2;
  const VectorXd d_act1 = p.dense2_w.transpose() * d_pre2;
  const VectorXd d_pre1 = (cache.pre1.array() > 0.0).select(d_act1, 0.0);
  g.dense1_w = d_pre1 * cache.context.transpose();
  g.dense1_b = d_pre1;
  const VectorXd d_context = p.dense1_w.transpose() * d_pre1;

  // context = H^T a, a = softmax(H w)
  const MatrixXd& hidden2 = cache.l2.hidden;
  MatrixXd d_hidden2 = cache.attention * d_context.transpose();
  if (!cache.uniform_attention) {
    const VectorXd d_attention = hidden2 * d_context;
    const double mean = cache.attention.dot(d_attention);
    const VectorXd d_scores = cache.attention.array() * (d_attention.array() - mean);
    g.attn_w = hidden2.transpose() * d_scores;
    d_hidden2.noalias() += d_scores * p.attn_w.transpose();
  }

  const MatrixXd d_hidden1 = lstm_backward(p.lstm2, net.config().cell_clip, cache.l2, d_hidden2, g.lstm2);
  const MatrixXd d_pooled = lstm_backward(p.lstm1, net.config().cell_clip, cache.l1, d_hidden1, g.lstm1);

  MatrixXd d_conv = MatrixXd::Zero(cache.conv_pre.rows(), cache.conv_pre.cols());
  for (Index s = 0; s < d_pooled.rows(); ++s) {
    for (Index f = 0; f < d_pooled.cols(); ++f) {
      const Index t = cache.argmax(s, f);
      if (cache.conv_pre(t, f) > 0.0) d_conv(t, f) += d_pooled(s, f);
    }
  }
  g.conv_w = d_conv.transpose() * cache.im2col;
  g.conv_b = d_conv.colwise().sum().transpose();
  return g;
}

double predict_proba(const LstmNetwork& net, const TokenSequence& seq) {
  return forward(net, seq, false).probability;
}

std::vector<TokenContribution> extract_token_contributions(const LstmNetwork& net, const TokenSequence& seq) {
  const auto result = forward(net, seq, false);
  const auto& cache = result.cache;
  std::vector<TokenContribution> out;
  if (cache.uniform_attention || seq.true_length == 0) return out;
  const Index pool = idx(net.config().pool);
  const Index length = idx(seq.true_length);
  std::vector<int> votes(static_cast<std::size_t>(pool));
  for (Index s = 0; s < idx(cache.steps); ++s) {
    const Index first = s * pool;
    if (first >= length) continue;
    std::fill(votes.begin(), votes.end(), 0);
    for (Index f = 0; f < cache.argmax.cols(); ++f) {
      const Index t = cache.argmax(s, f);
      if (t < length) ++votes[static_cast<std::size_t>(t - first)];
    }
    const auto best = std::max_element(votes.begin(), votes.end()) - votes.begin();
    out.push_back({static_cast<std::size_t>(first + best), cache.attention(s)});
  }
  // Without masking, padding-only steps carry weight too; renormalize over
  // the attributed tokens.
  double total = 0.0;
  for (const auto& c : out) total += c.weight;
  if (total > 0.0) {
    for (auto& c : out) c.weight /= total;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Training

nlohmann::json TrainConfig::to_json() const {
  return {{"epochs", epochs},
          {"batch_size", batch_size},
          {"lr", lr},
          {"seed", seed},
          {"optimizer", optimizer == Optimizer::Adam ? "adam" : "sgd_momentum"},
          {"momentum", momentum},
          {"beta1", beta1},
          {"beta2", beta2},
          {"epsilon", epsilon},
          {"patience", patience},
          {"clip_norm", clip_norm}};
}

void TrainConfig::validate() const {
  if (batch_size == 0) throw InputError("train: batch_size must be positive");
  if (!(lr >= 0.0)) throw InputError("train: lr must be non-negative");
  if (!(clip_norm >= 0.0)) throw InputError("train: clip_norm must be non-negative");
}

nlohmann::json TrainHistory::to_json() const {
  return {{"train_loss", train_loss},
          {"train_accuracy", train_accuracy},
          {"valid_accuracy", valid_accuracy},
          {"best_epoch", best_epoch},
          {"train_size", train_size}};
}

EncodedSet encode_corpus(const Corpus& corpus, const Vocabulary& vocab, std::size_t seq_len,
                         const TokenizerOptions& tokenizer) {
  EncodedSet set;
  set.sequences.reserve(corpus.size());
  set.labels.reserve(corpus.size());
  for (const auto& doc : corpus) {
    const auto tokens = tokenizer(doc.text);
    set.sequences.push_back(encode_sequence(tokens, vocab, seq_len));
    set.labels.push_back(doc.label);
  }
  return set;
}

namespace {

double accuracy(const LstmNetwork& net, const EncodedSet& set) {
  if (set.size() == 0) return 0.0;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < set.size(); ++i) {
    const bool fake = predict_proba(net, set.sequences[i]) >= 0.5;
    if (fake == (set.labels[i] == Label::Fake)) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(set.size());
}

}  // namespace

TrainResult train(const LstmNetwork& initial, const EncodedSet& train_set, const EncodedSet& valid_set,
                  const TrainConfig& cfg) {
  cfg.validate();
  if (train_set.size() == 0) throw InputError("train: empty training set");
  LstmNetwork net = initial;
  LstmParams best = net.params();
  LstmParams m = net.params().zeros_like();
  LstmParams v = m;

  TrainHistory history;
  history.train_size = train_set.size();
  double best_valid = -1.0;
  std::size_t since_best = 0;
  std::size_t step = 0;

  Rng shuffle_rng(cfg.seed, "lstm-shuffle");
  Rng dropout_rng(cfg.seed, "dropout");
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    shuffle_rng.shuffle(std::span(order));
    double loss_sum = 0.0;
    std::size_t correct = 0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      LstmParams grad = net.params().zeros_like();
      for (std::size_t k = start; k < end; ++k) {
        const std::size_t i = order[k];
        const auto fwd = forward(net, train_set.sequences[i], true, &dropout_rng);
        const double loss = bce_loss(fwd.cache, train_set.labels[i]);
        if (!std::isfinite(loss)) {
          throw TrainingError("train: non-finite loss at epoch " + std::to_string(epoch + 1) + ", example " +
                              std::to_string(i));
        }
        loss_sum += loss;
        if ((fwd.probability >= 0.5) == (train_set.labels[i] == Label::Fake)) ++correct;
        grad.add_scaled(backward(net, fwd.cache, train_set.labels[i]), 1.0);
      }
      grad.scale(1.0 / static_cast<double>(end - start));
      if (!grad.all_finite()) {
        throw TrainingError("train: non-finite gradient at epoch " + std::to_string(epoch + 1));
      }
      if (cfg.clip_norm > 0.0) {
        const double norm = std::sqrt(grad.squared_norm());
        if (norm > cfg.clip_norm) grad.scale(cfg.clip_norm / norm);
      }

      ++step;
      auto params = net.params().tensors();
      auto grads = grad.tensors();
      auto first = m.tensors();
      auto second = v.tensors();
      for (std::size_t t = 0; t < params.size(); ++t) {
        auto& w = params[t].second;
        const auto& g = grads[t].second;
        auto& mt = first[t].second;
        if (cfg.optimizer == Optimizer::Adam) {
          auto& vt = second[t].second;
          mt = cfg.beta1 * mt + (1.0 - cfg.beta1) * g;
          vt = cfg.beta2 * vt + (1.0 - cfg.beta2) * g.cwiseProduct(g);
          const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step));
          const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step));
          w.array() -= cfg.lr * (mt.array() / c1) / ((vt.array() / c2).sqrt() + cfg.epsilon);
        } else {
          mt = cfg.momentum * mt - cfg.lr * g;
          w += mt;
        }
      }
      if (!net.params().all_finite()) {
        throw TrainingError("train: parameters became non-finite at epoch " + std::to_string(epoch + 1));
      }
    }
    history.train_loss.push_back(loss_sum / static_cast<double>(order.size()));
    history.train_accuracy.push_back(static_cast<double>(correct) / static_cast<double>(order.size()));
    const double valid = valid_set.size() > 0 ? accuracy(net, valid_set) : history.train_accuracy.back();
    history.valid_accuracy.push_back(valid);
    if (valid > best_valid) {
      best_valid = valid;
      best = net.params();
      history.best_epoch = epoch + 1;
      since_best = 0;
    } else if (cfg.patience > 0 && ++since_best >= cfg.patience) {
      break;
    }
  }
  if (cfg.epochs > 0) net.params() = best;
  return {std::move(net), std::move(history)};
}

// ---------------------------------------------------------------------------
// Artifact

TokenSequence LstmArtifact::encode(std::string_view text) const {
  const auto tokens = tokenizer(text);
  return encode_sequence(tokens, vocabulary, network.config().seq_len);
}

double LstmArtifact::predict_proba(const Document& doc) const { return predict_proba_text(doc.text); }

double LstmArtifact::predict_proba_text(std::string_view text) const {
  return fakenews::predict_proba(network, encode(text));
}

std::string LstmArtifact::serialize() const {
  nlohmann::json header = {{"format", "fakenews-lstm"},
                           {"config", network.config().to_json()},
                           {"vocabulary", vocabulary.to_json()},
                           {"remove_stopwords", tokenizer.remove_stopwords},
                           {"embedding_hash", network.embedding().content_hash()},
                           {"training", training_meta}};
  const std::string json = header.dump();
  std::string out;
  binary::put_bytes(out, kMagic);
  binary::put_u32(out, kFileVersion);
  binary::put_u64(out, json.size());
  binary::put_bytes(out, json);

  const auto write_tensor = [&out](std::string_view name, Index rows, Index cols, const auto& at) {
    binary::put_u32(out, static_cast<std::uint32_t>(name.size()));
    binary::put_bytes(out, name);
    binary::put_u64(out, static_cast<std::uint64_t>(rows));
    binary::put_u64(out, static_cast<std::uint64_t>(cols));
    out.push_back(1);  // dtype: f64
    for (Index r = 0; r < rows; ++r) {
      for (Index c = 0; c < cols; ++c) binary::put_f64(out, at(r, c));
    }
  };
  const auto tensors = network.params().tensors();
  binary::put_u32(out, static_cast<std::uint32_t>(tensors.size() + 1));
  const auto& emb = network.embedding();
  write_tensor("embedding", emb.rows().rows(), emb.rows().cols(),
               [&emb](Index r, Index c) { return emb.rows()(r, c); });
  for (const auto& [name, t] : tensors) {
    write_tensor(name, t.rows(), t.cols(), [&t](Index r, Index c) { return t(r, c); });
  }
  return out;
}

LstmArtifact LstmArtifact::deserialize(std::string_view bytes, const std::string& what) {
  binary::Reader in(bytes, what);
  if (in.bytes(kMagic.size()) != kMagic) throw InputError(what + ": not an lstm model file");
  if (const auto version = in.u32(); version != kFileVersion) {
    throw InputError(what + ": unsupported lstm model version " + std::to_string(version));
  }
  const auto json_len = in.u64();
  if (json_len > in.remaining()) throw InputError(what + ": truncated");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(in.bytes(static_cast<std::size_t>(json_len)));
  } catch (const nlohmann::json::exception& e) {
    throw InputError(what + ": malformed header: " + e.what());
  }

  std::map<std::string, MatrixXd> blocks;
  const auto count = in.u32();
  for (std::uint32_t b = 0; b < count; ++b) {
    const auto name_len = in.u32();
    std::string name(in.bytes(name_len));
    const auto rows = in.u64();
    const auto cols = in.u64();
    if (const auto dtype = static_cast<unsigned char>(in.bytes(1)[0]); dtype != 1) {
      throw InputError(what + ": tensor " + name + " has unsupported dtype");
    }
    if (cols != 0 && rows > in.remaining() / 8 / cols) throw InputError(what + ": truncated");
    MatrixXd m(static_cast<Index>(rows), static_cast<Index>(cols));
    for (Index r = 0; r < m.rows(); ++r) {
      for (Index c = 0; c < m.cols(); ++c) m(r, c) = in.f64();
    }
    blocks[name] = std::move(m);
  }
  if (!in.done()) throw InputError(what + ": trailing bytes");

  try {
    LstmArtifact artifact;
    artifact.vocabulary = Vocabulary::from_json(header.at("vocabulary"));
    artifact.tokenizer.remove_stopwords = header.at("remove_stopwords").get<bool>();
    artifact.training_meta = header.at("training");
    const auto config = LstmConfig::from_json(header.at("config"));
    const auto take = [&](const std::string& name) {
      const auto it = blocks.find(name);
      if (it == blocks.end()) throw InputError(what + ": missing tensor " + name);
      return it->second;
    };
    auto embedding = std::make_shared<const EmbeddingMatrix>(RowMatrix(take("embedding")), artifact.vocabulary.hash());
    if (embedding->content_hash() != header.at("embedding_hash").get<std::string>()) {
      throw InputError(what + ": embedding block does not match its recorded hash");
    }
    LstmParams params;
    params.conv_w = take("conv_w");
    params.conv_b = take("conv_b");
    params.lstm1 = {take("lstm1_w"), take("lstm1_u"), take("lstm1_b")};
    params.lstm2 = {take("lstm2_w"), take("lstm2_u"), take("lstm2_b")};
    params.attn_w = take("attn_w");
    params.dense1_w = take("dense1_w");
    params.dense1_b = take("dense1_b");
    params.dense2_w = take("dense2_w");
    params.dense2_b = take("dense2_b");
    params.dense3_w = take("dense3_w");
    params.dense3_b = take("dense3_b");
    if (!params.all_finite()) throw InputError(what + ": non-finite parameters");
    artifact.network = LstmNetwork(config, std::move(embedding), std::move(params));
    return artifact;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(what + ": malformed header: " + e.what());
  }
}

void save_lstm(const LstmArtifact& artifact, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  const auto bytes = artifact.serialize();
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("write failed: " + path.string());
}

LstmArtifact load_lstm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return LstmArtifact::deserialize(ss.str(), path.string());
}

}  // namespace fakenews
