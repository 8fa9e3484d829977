#include "fakenews/tfidf.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "fakenews/hash.hpp"

namespace fakenews {

SparseVector::SparseVector(std::vector<Entry> entries) {
  std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) { return a.first < b.first; });
  for (const auto& [index, value] : entries) {
    if (!entries_.empty() && entries_.back().first == index) {
      entries_.back().second += value;
    } else {
      entries_.emplace_back(index, value);
    }
  }
  std::erase_if(entries_, [](const Entry& e) { return e.second == 0.0; });
}

double SparseVector::get(TokenId index) const {
  const auto it = std::lower_bound(entries_.begin(), entries_.end(), index,
                                   [](const Entry& e, TokenId i) { return e.first < i; });
  return it != entries_.end() && it->first == index ? it->second : 0.0;
}

double SparseVector::squared_norm() const {
  double s = 0.0;
  for (const auto& [index, value] : entries_) s += value * value;
  return s;
}

double SparseVector::norm() const { return std::sqrt(squared_norm()); }

bool SparseVector::all_finite() const {
  return std::all_of(entries_.begin(), entries_.end(), [](const Entry& e) { return std::isfinite(e.second); });
}

TfIdfModel::TfIdfModel(Vocabulary vocabulary, std::vector<double> idf, std::size_t document_count,
                       TokenizerOptions tokenizer)
    : vocabulary_(std::move(vocabulary)), idf_(std::move(idf)), document_count_(document_count), tokenizer_(tokenizer) {
  if (idf_.size() != vocabulary_.size()) throw InputError("idf length does not match vocabulary size");
  for (const double v : idf_) {
    if (!std::isfinite(v) || v < 0) throw InputError("idf values must be finite and non-negative");
  }
}

nlohmann::json TfIdfModel::to_json() const {
  nlohmann::json idf = nlohmann::json::array();
  for (const double v : idf_) idf.push_back(hexfloat(v));
  return {{"vocabulary", vocabulary_.to_json()},
          {"idf", std::move(idf)},
          {"document_count", document_count_},
          {"remove_stopwords", tokenizer_.remove_stopwords}};
}

TfIdfModel TfIdfModel::from_json(const nlohmann::json& j) {
  try {
    std::vector<double> idf;
    for (const auto& v : j.at("idf")) idf.push_back(parse_hexfloat(v.get<std::string>()));
    TokenizerOptions tokenizer;
    tokenizer.remove_stopwords = j.at("remove_stopwords").get<bool>();
    return TfIdfModel(Vocabulary::from_json(j.at("vocabulary")), std::move(idf),
                      j.at("document_count").get<std::size_t>(), tokenizer);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("malformed TF-IDF model: ") + e.what());
  }
}

TfIdfModel fit_tfidf(std::span<const std::vector<std::string>> train_documents, const Vocabulary& vocab,
                     TokenizerOptions tokenizer) {
  if (train_documents.empty()) throw InputError("cannot fit TF-IDF on an empty training corpus");
  std::vector<std::size_t> df(vocab.size(), 0);
  std::vector<std::size_t> last_seen(vocab.size(), 0);
  for (std::size_t d = 0; d < train_documents.size(); ++d) {
    for (const auto& token : train_documents[d]) {
      if (const auto id = vocab.find(token)) {
        auto& mark = last_seen[static_cast<std::size_t>(*id) - 1];
        if (mark != d + 1) {
          mark = d + 1;
          ++df[static_cast<std::size_t>(*id) - 1];
        }
      }
    }
  }
  const auto n = static_cast<double>(train_documents.size());
  std::vector<double> idf(vocab.size());
  for (std::size_t t = 0; t < vocab.size(); ++t) {
    idf[t] = std::log((1.0 + n) / (1.0 + static_cast<double>(df[t]))) + 1.0;
  }
  return TfIdfModel(vocab, std::move(idf), train_documents.size(), tokenizer);
}

TfIdfModel fit_tfidf(const Corpus& train, const Vocabulary& vocab, TokenizerOptions tokenizer) {
  if (train.empty()) throw InputError("cannot fit TF-IDF on an empty training corpus");
  std::vector<std::vector<std::string>> docs;
  docs.reserve(train.size());
  for (const auto& doc : train) docs.push_back(tokenizer(doc.text));
  return fit_tfidf(docs, vocab, tokenizer);
}

SparseVector transform_tfidf(std::span<const std::string> tokens, const TfIdfModel& model) {
  std::map<TokenId, double> counts;
  for (const auto& token : tokens) {
    if (const auto id = model.vocabulary().find(token)) counts[*id] += 1.0;
  }
  std::vector<SparseVector::Entry> entries;
  entries.reserve(counts.size());
  double norm2 = 0.0;
  for (const auto& [id, count] : counts) {
    const double w = count * model.idf()[static_cast<std::size_t>(id) - 1];
    entries.emplace_back(id, w);
    norm2 += w * w;
  }
  if (norm2 > 0.0) {
    const double inv = 1.0 / std::sqrt(norm2);
    for (auto& e : entries) e.second *= inv;
  }
  return SparseVector(std::move(entries));
}

SparseVector transform_tfidf(const Document& doc, const TfIdfModel& model) {
  const auto tokens = model.tokenizer()(doc.text);
  return transform_tfidf(tokens, model);
}

}  // namespace fakenews
