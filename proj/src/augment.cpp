#include "fakenews/augment.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "fakenews/rng.hpp"
#include "fakenews/text.hpp"

namespace fakenews {
namespace {

std::string lower_ascii(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

}  // namespace

SynonymLexicon::SynonymLexicon(std::map<std::string, std::vector<std::string>> synonyms) {
  for (auto& [word, list] : synonyms) {
    const std::string key = lower_ascii(word);
    std::set<std::string> seen;
    std::vector<std::string> kept;
    for (const auto& s : list) {
      std::string syn = lower_ascii(s);
      // Synonyms must survive cleaning as exactly one token.
      if (syn.empty() || syn == key || clean_text(syn) != syn || !seen.insert(syn).second) continue;
      kept.push_back(std::move(syn));
    }
    if (kept.empty()) continue;
    auto& slot = synonyms_[key];
    for (auto& syn : kept) {
      if (std::find(slot.begin(), slot.end(), syn) == slot.end()) slot.push_back(std::move(syn));
    }
  }
}

const std::vector<std::string>* SynonymLexicon::find(const std::string& word) const {
  const auto it = synonyms_.find(word);
  return it == synonyms_.end() ? nullptr : &it->second;
}

SynonymLexicon load_lexicon(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open lexicon " + path.string());
  std::map<std::string, std::vector<std::string>> table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    const std::string where = path.string() + ":" + std::to_string(line_no);
    if (tab == std::string::npos) throw InputError(where + ": expected word<TAB>synonyms");
    const std::string word = trim(line.substr(0, tab));
    if (word.empty() || word.find(' ') != std::string::npos) throw InputError(where + ": invalid headword");
    auto& list = table[word];
    std::string rest = line.substr(tab + 1);
    std::size_t start = 0;
    while (start <= rest.size()) {
      const auto comma = rest.find(',', start);
      const std::string syn = trim(rest.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
      if (!syn.empty()) {
        if (syn.find_first_of(" \t") != std::string::npos) {
          throw InputError(where + ": multi-word synonym '" + syn + "'");
        }
        list.push_back(syn);
      }
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
  }
  return SynonymLexicon(std::move(table));
}

Document augment_document(const Document& doc, const SynonymLexicon& lexicon, double replace_prob,
                          std::uint64_t rng_seed, const std::string& new_id) {
  if (!(replace_prob >= 0.0 && replace_prob <= 1.0)) {
    throw InputError("replace_prob must be in [0, 1]");
  }
  Rng rng(rng_seed);
  auto tokens = clean_tokens(doc.text);
  bool replaced = false;
  for (auto& token : tokens) {
    const auto* synonyms = lexicon.find(token);
    if (synonyms == nullptr) continue;
    if (rng.bernoulli(replace_prob)) {
      token = (*synonyms)[rng.below(synonyms->size())];
      replaced = true;
    }
  }
  Document out = doc;
  out.id = new_id;
  if (!replaced) return out;
  out.text.clear();
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out.text.push_back(' ');
    out.text += tokens[i];
  }
  return out;
}

Corpus augment_corpus(const Corpus& train, const SynonymLexicon& lexicon, const AugmentOptions& options,
                      std::uint64_t seed) {
  if (train.role() == SplitRole::Test) {
    throw InputError("refusing to augment corpus '" + train.name() + "': it is a test split");
  }
  std::vector<Document> docs;
  docs.reserve(train.size() * (1 + options.copies_per_doc));
  for (const auto& doc : train) {
    docs.push_back(doc);
    for (std::size_t k = 1; k <= options.copies_per_doc; ++k) {
      const std::string id = doc.id + "#aug" + std::to_string(k);
      const std::uint64_t doc_seed = derive_seed(seed, "augment/" + doc.id + "/" + std::to_string(k));
      docs.push_back(augment_document(doc, lexicon, options.replace_prob, doc_seed, id));
    }
  }
  return Corpus(train.name() + "+aug", std::move(docs), SplitRole::Train);
}

}  // namespace fakenews
