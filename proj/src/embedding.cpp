#include "fakenews/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "fakenews/binary_io.hpp"
#include "fakenews/hash.hpp"
#include "fakenews/rng.hpp"

namespace fakenews {
namespace {

constexpr std::string_view kMagic{"FNEMBED\0", 8};
constexpr std::uint32_t kFileVersion = 1;

// Gradient of one skip-gram pair. Writes d_center and returns the loss;
// if `lr` is non-zero the output vectors are updated in place with step lr.
template <typename Center, typename Out>
double pair_step(const Center& center, Out& outputs, TokenId context, std::span<const TokenId> negatives, double lr,
                 Eigen::VectorXd& d_center) {
  d_center.setZero();
  double loss = 0.0;
  {
    auto u = outputs.row(context);
    const double s = sigmoid(center.dot(u));
    loss -= std::log(std::max(s, 1e-300));
    const double g = s - 1.0;
    d_center.noalias() += g * u.transpose();
    if (lr != 0.0) u.noalias() -= lr * g * center;
  }
  for (const TokenId k : negatives) {
    auto u = outputs.row(k);
    const double s = sigmoid(center.dot(u));
    loss -= std::log(std::max(1.0 - s, 1e-300));
    d_center.noalias() += s * u.transpose();
    if (lr != 0.0) u.noalias() -= lr * s * center;
  }
  return loss;
}

}  // namespace

EmbeddingMatrix::EmbeddingMatrix(RowMatrix rows, std::string vocab_hash)
    : rows_(std::move(rows)), vocab_hash_(std::move(vocab_hash)) {
  if (rows_.rows() < 1) throw InputError("embedding matrix needs at least the padding row");
  if (!rows_.row(0).isZero(0.0)) throw InputError("embedding padding row must be zero");
  if (!rows_.allFinite()) throw InputError("embedding matrix has non-finite entries");
}

std::string EmbeddingMatrix::serialize() const {
  std::string out;
  out.reserve(64 + static_cast<std::size_t>(rows_.size()) * 8);
  binary::put_bytes(out, kMagic);
  binary::put_u32(out, kFileVersion);
  binary::put_u64(out, vocab_size());
  binary::put_u64(out, dim());
  const auto digest = digest_from_hex(vocab_hash_);
  binary::put_bytes(out, std::string_view(reinterpret_cast<const char*>(digest.data()), digest.size()));
  for (Eigen::Index r = 0; r < rows_.rows(); ++r) {
    for (Eigen::Index c = 0; c < rows_.cols(); ++c) binary::put_f64(out, rows_(r, c));
  }
  return out;
}

EmbeddingMatrix EmbeddingMatrix::deserialize(std::string_view bytes, const std::string& expected_vocab_hash,
                                             const std::string& what) {
  binary::Reader in(bytes, what);
  if (in.bytes(kMagic.size()) != kMagic) throw InputError(what + ": not an embedding file");
  if (const auto version = in.u32(); version != kFileVersion) {
    throw InputError(what + ": unsupported embedding version " + std::to_string(version));
  }
  const std::uint64_t vocab = in.u64();
  const std::uint64_t dim = in.u64();
  const auto digest = in.bytes(32);
  const std::string hash = to_hex(std::span(reinterpret_cast<const std::uint8_t*>(digest.data()), digest.size()));
  if (hash != expected_vocab_hash) {
    throw InputError(what + ": built for a different vocabulary (hash " + hash + ")");
  }
  if (dim == 0 || (vocab + 1) > in.remaining() / 8 / dim || in.remaining() != (vocab + 1) * dim * 8) {
    throw InputError(what + ": truncated or oversized matrix block");
  }
  RowMatrix rows(static_cast<Eigen::Index>(vocab + 1), static_cast<Eigen::Index>(dim));
  for (Eigen::Index r = 0; r < rows.rows(); ++r) {
    for (Eigen::Index c = 0; c < rows.cols(); ++c) rows(r, c) = in.f64();
  }
  return EmbeddingMatrix(std::move(rows), hash);
}

std::string EmbeddingMatrix::content_hash() const { return sha256_hex(serialize()); }

SkipGramGradient skipgram_pair_gradient(const Eigen::VectorXd& center, const Eigen::VectorXd& context,
                                        std::span<const Eigen::VectorXd> negatives) {
  const auto dim = center.size();
  RowMatrix outputs(static_cast<Eigen::Index>(negatives.size() + 1), dim);
  outputs.row(0) = context.transpose();
  std::vector<TokenId> neg_ids;
  for (std::size_t k = 0; k < negatives.size(); ++k) {
    outputs.row(static_cast<Eigen::Index>(k + 1)) = negatives[k].transpose();
    neg_ids.push_back(static_cast<TokenId>(k + 1));
  }
  SkipGramGradient grad;
  grad.d_center = Eigen::VectorXd::Zero(dim);
  const Eigen::RowVectorXd c = center.transpose();
  grad.loss = pair_step(c, outputs, 0, neg_ids, 0.0, grad.d_center);
  grad.d_context = (sigmoid(center.dot(context)) - 1.0) * center;
  for (const auto& u : negatives) grad.d_negatives.push_back(sigmoid(center.dot(u)) * center);
  return grad;
}

EmbeddingMatrix train_word2vec(std::span<const std::vector<TokenId>> sentences, const Vocabulary& vocab,
                               const Word2VecConfig& config) {
  if (vocab.empty()) throw InputError("word2vec: vocabulary is empty");
  if (config.dim < 1 || config.window < 1 || config.negatives < 1) {
    throw InputError("word2vec: dim, window and negatives must be at least 1");
  }
  const std::size_t v = vocab.size();
  const auto dim = static_cast<Eigen::Index>(config.dim);

  std::vector<double> freq(v + 1, 0.0);
  std::size_t total_tokens = 0;
  bool has_bigram = false;
  for (const auto& sentence : sentences) {
    for (const TokenId id : sentence) {
      if (id < 1 || static_cast<std::size_t>(id) > v) throw InputError("word2vec: token index out of range");
      freq[static_cast<std::size_t>(id)] += 1.0;
    }
    total_tokens += sentence.size();
    has_bigram = has_bigram || sentence.size() >= 2;
  }
  if (!has_bigram) throw InputError("word2vec: corpus has no in-vocabulary bigrams");

  Rng init_rng(config.seed, "word2vec-init");
  RowMatrix input = RowMatrix::Zero(static_cast<Eigen::Index>(v + 1), dim);
  const double bound = 0.5 / static_cast<double>(config.dim);
  for (Eigen::Index r = 1; r < input.rows(); ++r) {
    for (Eigen::Index c = 0; c < dim; ++c) input(r, c) = init_rng.uniform(-bound, bound);
  }
  if (config.epochs == 0) return EmbeddingMatrix(std::move(input), vocab.hash());

  // Cumulative unigram^0.75 noise distribution over indices 1..V.
  std::vector<double> cumulative(v + 1, 0.0);
  for (std::size_t i = 1; i <= v; ++i) cumulative[i] = cumulative[i - 1] + std::pow(freq[i], 0.75);
  const double noise_total = cumulative[v];

  RowMatrix output = RowMatrix::Zero(static_cast<Eigen::Index>(v + 1), dim);
  Rng rng(config.seed, "word2vec-train");
  Eigen::VectorXd d_center(dim);
  std::vector<TokenId> negatives;
  negatives.reserve(config.negatives);
  std::vector<TokenId> kept;
  const double total_steps = static_cast<double>(config.epochs) * static_cast<double>(total_tokens);
  double processed = 0.0;

  const auto sample_noise = [&]() {
    const double u = rng.uniform() * noise_total;
    const auto it = std::upper_bound(cumulative.begin() + 1, cumulative.end(), u);
    return static_cast<TokenId>(std::min<std::ptrdiff_t>(it - cumulative.begin(), static_cast<std::ptrdiff_t>(v)));
  };

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    for (const auto& sentence : sentences) {
      kept.clear();
      for (const TokenId id : sentence) {
        if (config.subsample > 0.0) {
          const double f = freq[static_cast<std::size_t>(id)] / static_cast<double>(total_tokens);
          const double keep = (std::sqrt(f / config.subsample) + 1.0) * config.subsample / f;
          if (keep < rng.uniform()) continue;
        }
        kept.push_back(id);
      }
      for (std::size_t pos = 0; pos < kept.size(); ++pos) {
        const double lr = config.lr * std::max(0.0, 1.0 - processed / total_steps);
        processed += 1.0;
        const std::size_t reach = config.window - rng.below(config.window);  // uniform in 1..window
        const std::size_t lo = pos >= reach ? pos - reach : 0;
        const std::size_t hi = std::min(kept.size() - 1, pos + reach);
        for (std::size_t ctx = lo; ctx <= hi; ++ctx) {
          if (ctx == pos) continue;
          const TokenId target = kept[ctx];
          negatives.clear();
          for (std::size_t k = 0; k < config.negatives; ++k) {
            const TokenId noise = sample_noise();
            if (noise != target) negatives.push_back(noise);
          }
          auto center = input.row(kept[pos]);
          pair_step(center, output, target, negatives, lr, d_center);
          center.noalias() -= lr * d_center.transpose();
        }
      }
    }
  }
  input.row(0).setZero();
  if (!input.allFinite()) throw TrainingError("word2vec: training produced non-finite vectors");
  return EmbeddingMatrix(std::move(input), vocab.hash());
}

EmbeddingMatrix train_word2vec(const Corpus& corpus, const Vocabulary& vocab, const Word2VecConfig& config,
                               const TokenizerOptions& tokenizer) {
  std::vector<std::vector<TokenId>> sentences;
  sentences.reserve(corpus.size());
  for (const auto& doc : corpus) {
    std::vector<TokenId> ids;
    for (const auto& token : tokenizer(doc.text)) {
      if (const auto id = vocab.find(token)) ids.push_back(*id);
    }
    sentences.push_back(std::move(ids));
  }
  return train_word2vec(sentences, vocab, config);
}

std::vector<Neighbor> nearest_neighbors(const EmbeddingMatrix& matrix, const Vocabulary& vocab, std::string_view word,
                                        std::size_t k) {
  const auto query = vocab.find(word);
  if (!query) throw InputError("nearest_neighbors: '" + std::string(word) + "' is not in the vocabulary");
  const auto& rows = matrix.rows();
  const Eigen::RowVectorXd q = rows.row(*query);
  const double qn = q.norm();
  std::vector<std::pair<TokenId, double>> scored;
  for (Eigen::Index r = 1; r < rows.rows(); ++r) {
    if (r == *query) continue;
    const double n = rows.row(r).norm();
    const double sim = (qn > 0.0 && n > 0.0) ? q.dot(rows.row(r)) / (qn * n) : 0.0;
    scored.emplace_back(static_cast<TokenId>(r), sim);
  }
  const std::size_t keep = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(keep), scored.end(),
                    [](const auto& a, const auto& b) { return a.second != b.second ? a.second > b.second : a.first < b.first; });
  std::vector<Neighbor> out;
  out.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) out.emplace_back(vocab.word(scored[i].first), scored[i].second);
  return out;
}

void save_embeddings(const EmbeddingMatrix& matrix, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  const auto bytes = matrix.serialize();
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("write failed: " + path.string());
}

EmbeddingMatrix load_embeddings(const std::filesystem::path& path, const Vocabulary& vocab) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return EmbeddingMatrix::deserialize(ss.str(), vocab.hash(), path.string());
}

}  // namespace fakenews
