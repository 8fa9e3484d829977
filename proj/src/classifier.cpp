#include "fakenews/classifier.hpp"

#include <fstream>
#include <sstream>

#include "fakenews/config.hpp"
#include "fakenews/hash.hpp"
#include "fakenews/tfidf.hpp"
#include "fakenews/vocabulary.hpp"

namespace fakenews {
namespace {

void read_logistic(ObjectReader r, LogisticConfig& c) {
  r.read("epochs", c.epochs).read("lr", c.lr).read("l2", c.l2).read("decay", c.decay).finish();
}

void read_pa(ObjectReader r, PassiveAggressiveConfig& c) {
  r.read("c", c.c).read("epochs", c.epochs).read("fit_intercept", c.fit_intercept).finish();
}

void read_word2vec(ObjectReader r, Word2VecConfig& c) {
  r.read("dim", c.dim)
      .read("window", c.window)
      .read("negatives", c.negatives)
      .read("epochs", c.epochs)
      .read("lr", c.lr)
      .read("subsample", c.subsample)
      .finish();
}

void read_lstm(ObjectReader r, LstmConfig& c) {
  r.read("seq_len", c.seq_len)
      .read("filters", c.filters)
      .read("kernel", c.kernel)
      .read("pool", c.pool)
      .read("hidden1", c.hidden1)
      .read("hidden2", c.hidden2)
      .read("dense1", c.dense1)
      .read("dense2", c.dense2)
      .read("dropout", c.dropout)
      .read("mask_padding", c.mask_padding)
      .read("cell_clip", c.cell_clip)
      .finish();
  c.validate();
}

void read_train(ObjectReader r, TrainConfig& c) {
  std::string optimizer = c.optimizer == Optimizer::Adam ? "adam" : "sgd_momentum";
  r.read("epochs", c.epochs)
      .read("batch_size", c.batch_size)
      .read("lr", c.lr)
      .read("optimizer", optimizer)
      .read("momentum", c.momentum)
      .read("beta1", c.beta1)
      .read("beta2", c.beta2)
      .read("epsilon", c.epsilon)
      .read("patience", c.patience)
      .read("clip_norm", c.clip_norm)
      .finish();
  if (optimizer == "adam") {
    c.optimizer = Optimizer::Adam;
  } else if (optimizer == "sgd_momentum") {
    c.optimizer = Optimizer::SgdMomentum;
  } else {
    throw InputError(r.path("optimizer") + ": expected adam or sgd_momentum, got '" + optimizer + "'");
  }
  c.validate();
}

std::vector<std::vector<std::string>> tokenize_all(const Corpus& corpus, const TokenizerOptions& tokenizer) {
  std::vector<std::vector<std::string>> docs;
  docs.reserve(corpus.size());
  for (const auto& doc : corpus) docs.push_back(tokenizer(doc.text));
  return docs;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::Logistic:
      return "logistic";
    case ModelKind::PassiveAggressive:
      return "passive_aggressive";
    case ModelKind::Lstm:
      return "lstm";
  }
  return "?";
}

ModelKind parse_model_kind(std::string_view text) {
  if (text == "logistic") return ModelKind::Logistic;
  if (text == "passive_aggressive") return ModelKind::PassiveAggressive;
  if (text == "lstm") return ModelKind::Lstm;
  throw InputError("unknown model kind '" + std::string(text) + "' (expected logistic, passive_aggressive or lstm)");
}

ModelConfig ModelConfig::defaults(ModelKind kind) {
  ModelConfig c;
  c.kind = kind;
  c.remove_stopwords = kind != ModelKind::Lstm;
  return c;
}

nlohmann::json ModelConfig::to_json() const {
  auto train_json = train.to_json();
  train_json.erase("seed");
  return {{"kind", to_string(kind)},
          {"remove_stopwords", remove_stopwords},
          {"max_vocab", max_vocab ? nlohmann::json(*max_vocab) : nlohmann::json(nullptr)},
          {"min_count", min_count},
          {"logistic", {{"epochs", logistic.epochs}, {"lr", logistic.lr}, {"l2", logistic.l2}, {"decay", logistic.decay}}},
          {"passive_aggressive",
           {{"c", passive_aggressive.c},
            {"epochs", passive_aggressive.epochs},
            {"fit_intercept", passive_aggressive.fit_intercept}}},
          {"word2vec",
           {{"dim", word2vec.dim},
            {"window", word2vec.window},
            {"negatives", word2vec.negatives},
            {"epochs", word2vec.epochs},
            {"lr", word2vec.lr},
            {"subsample", word2vec.subsample}}},
          {"lstm", lstm.to_json()},
          {"train", train_json},
          {"valid_fraction", valid_fraction}};
}

ModelConfig ModelConfig::from_json(const nlohmann::json& j, const std::string& where) {
  ObjectReader r(j, where);
  std::string kind = "logistic";
  r.read("kind", kind);
  ModelConfig c = defaults(parse_model_kind(kind));
  r.read("remove_stopwords", c.remove_stopwords);
  if (const auto* v = r.find("max_vocab"); v != nullptr && !v->is_null()) {
    if (!v->is_number_unsigned()) throw InputError(r.path("max_vocab") + ": expected a non-negative integer or null");
    c.max_vocab = v->get<std::size_t>();
  }
  r.read("min_count", c.min_count).read("valid_fraction", c.valid_fraction);
  if (const auto* v = r.find("logistic")) read_logistic(ObjectReader(*v, r.path("logistic")), c.logistic);
  if (const auto* v = r.find("passive_aggressive")) {
    read_pa(ObjectReader(*v, r.path("passive_aggressive")), c.passive_aggressive);
  }
  if (const auto* v = r.find("word2vec")) read_word2vec(ObjectReader(*v, r.path("word2vec")), c.word2vec);
  if (const auto* v = r.find("lstm")) read_lstm(ObjectReader(*v, r.path("lstm")), c.lstm);
  if (const auto* v = r.find("train")) read_train(ObjectReader(*v, r.path("train")), c.train);
  r.finish();
  if (c.min_count == 0) throw InputError(where + ".min_count: must be at least 1");
  if (!(c.valid_fraction >= 0.0 && c.valid_fraction < 1.0)) {
    throw InputError(where + ".valid_fraction: must be in [0, 1)");
  }
  return c;
}

ModelKind Classifier::kind() const {
  if (const auto* l = linear()) {
    return l->model.kind == LinearKind::Logistic ? ModelKind::Logistic : ModelKind::PassiveAggressive;
  }
  return ModelKind::Lstm;
}

double Classifier::predict_proba(const Document& doc) const {
  return std::visit([&](const auto& m) { return m.predict_proba(doc); }, model_);
}

double Classifier::predict_proba_text(std::string_view text) const {
  return std::visit([&](const auto& m) { return m.predict_proba_text(text); }, model_);
}

const nlohmann::json& Classifier::training_meta() const {
  if (const auto* l = linear()) return l->model.training_meta;
  return lstm()->training_meta;
}

std::string Classifier::serialize() const {
  if (const auto* l = linear()) return l->to_json().dump() + "\n";
  return lstm()->serialize();
}

std::string Classifier::hash() const { return sha256_hex(serialize()); }

TrainedModel train_classifier(const ModelConfig& config, const Corpus& train, std::uint64_t seed,
                              const nlohmann::json& provenance, const CorpusTransform& expand) {
  if (train.empty()) throw InputError("train: empty training corpus '" + train.name() + "'");
  TokenizerOptions tokenizer;
  tokenizer.remove_stopwords = config.remove_stopwords;
  VocabularyOptions vocab_options;
  vocab_options.max_size = config.max_vocab;
  vocab_options.min_count = config.min_count;
  vocab_options.tokenizer = tokenizer;
  nlohmann::json meta_extra = {{"model_config", config.to_json()}, {"provenance", provenance}};

  if (config.kind != ModelKind::Lstm) {
    const Corpus fit = expand ? expand(train) : train;
    const auto docs = tokenize_all(fit, tokenizer);
    const Vocabulary vocab = build_vocabulary(docs, vocab_options);
    LinearArtifact artifact;
    artifact.tfidf = fit_tfidf(docs, vocab, tokenizer);
    std::vector<SparseVector> x;
    std::vector<Label> y;
    x.reserve(docs.size());
    for (std::size_t i = 0; i < docs.size(); ++i) {
      x.push_back(transform_tfidf(docs[i], artifact.tfidf));
      y.push_back(fit[i].label);
    }
    if (config.kind == ModelKind::Logistic) {
      auto cfg = config.logistic;
      cfg.seed = seed;
      artifact.model = train_logistic(x, y, vocab.size(), cfg);
    } else {
      auto cfg = config.passive_aggressive;
      cfg.seed = seed;
      artifact.model = train_passive_aggressive(x, y, vocab.size(), cfg);
    }
    artifact.model.training_meta.update(meta_extra);
    artifact.model.training_meta["train_size"] = fit.size();
    return {Classifier(std::move(artifact)), nullptr};
  }

  // Hold out a validation slice for epoch selection when both classes allow it.
  Corpus fit = train;
  Corpus valid;
  if (config.valid_fraction > 0.0 && train.count(Label::Fake) >= 2 && train.count(Label::Real) >= 2) {
    auto parts = split(train, config.valid_fraction, derive_seed(seed, "lstm-valid"));
    fit = std::move(parts.train);
    valid = std::move(parts.test);
  }
  if (expand) fit = expand(fit);

  const auto docs = tokenize_all(fit, tokenizer);
  Vocabulary vocab = build_vocabulary(docs, vocab_options);
  std::vector<std::vector<TokenId>> sentences;
  sentences.reserve(docs.size());
  for (const auto& d : docs) {
    std::vector<TokenId> ids;
    for (const auto& w : d) {
      if (const auto id = vocab.find(w)) ids.push_back(*id);
    }
    sentences.push_back(std::move(ids));
  }
  auto w2v = config.word2vec;
  w2v.seed = derive_seed(seed, "word2vec");
  auto embedding = std::make_shared<const EmbeddingMatrix>(train_word2vec(sentences, vocab, w2v));

  LstmNetwork initial(config.lstm, embedding, seed);
  const auto fit_set = encode_corpus(fit, vocab, config.lstm.seq_len, tokenizer);
  const auto valid_set = encode_corpus(valid, vocab, config.lstm.seq_len, tokenizer);
  auto cfg = config.train;
  cfg.seed = seed;
  auto result = fakenews::train(initial, fit_set, valid_set, cfg);

  LstmArtifact artifact;
  artifact.vocabulary = std::move(vocab);
  artifact.tokenizer = tokenizer;
  artifact.network = std::move(result.network);
  artifact.training_meta = {{"seed", seed}, {"train_size", fit.size()}, {"valid_size", valid.size()}, {"history", result.history.to_json()}};
  artifact.training_meta.update(meta_extra);
  auto history = result.history.to_json();
  return {Classifier(std::move(artifact)), std::move(history)};
}

void save_classifier(const Classifier& classifier, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  const auto bytes = classifier.serialize();
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("write failed: " + path.string());
}

Classifier load_classifier(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  if (bytes.starts_with("FNLSTM")) return Classifier(LstmArtifact::deserialize(bytes, path.string()));
  try {
    return Classifier(LinearArtifact::from_json(nlohmann::json::parse(bytes)));
  } catch (const nlohmann::json::exception& e) {
    throw InputError(path.string() + ": not a model file (" + e.what() + ")");
  }
}

}  // namespace fakenews
