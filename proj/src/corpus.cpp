#include "fakenews/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "fakenews/hash.hpp"
#include "fakenews/rng.hpp"

namespace fakenews {
namespace fs = std::filesystem;
using nlohmann::json;

Corpus::Corpus(std::string name, std::vector<Document> documents, SplitRole role)
    : name_(std::move(name)), documents_(std::move(documents)), role_(role) {
  std::unordered_set<std::string_view> seen;
  seen.reserve(documents_.size());
  for (const auto& doc : documents_) {
    if (!seen.insert(doc.id).second) {
      throw InputError("duplicate document id '" + doc.id + "' in corpus '" + name_ + "'");
    }
    ++counts_[static_cast<std::size_t>(doc.label)];
  }
}

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw InputError("cannot open " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

bool blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

struct CsvRecord {
  std::size_t line = 0;
  std::vector<std::string> fields;
};

// RFC 4180: quoted fields may span lines and escape quotes by doubling.
std::vector<CsvRecord> parse_csv(std::string_view data, const fs::path& path) {
  std::vector<CsvRecord> records;
  CsvRecord current;
  std::string field;
  std::size_t line = 1;
  current.line = line;
  bool in_quotes = false;
  bool field_started = false;
  bool record_has_content = false;

  const auto end_field = [&] {
    current.fields.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  const auto end_record = [&] {
    end_field();
    if (record_has_content || current.fields.size() > 1 || !current.fields.front().empty()) {
      records.push_back(std::move(current));
    }
    current = CsvRecord{};
    current.line = line;
    record_has_content = false;
  };

  if (data.starts_with("\xEF\xBB\xBF")) {
    data.remove_prefix(3);
  }
  for (std::size_t i = 0; i < data.size(); ++i) {
    const char c = data[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < data.size() && data[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (c == '\n') ++line;
        field.push_back(c);
      }
      continue;
    }
    switch (c) {
      case '"':
        if (field_started && !field.empty()) {
          throw InputError(path.string() + ":" + std::to_string(line) + ": stray quote inside unquoted field");
        }
        in_quotes = true;
        field_started = true;
        record_has_content = true;
        break;
      case ',':
        end_field();
        record_has_content = true;
        break;
      case '\r':
        break;
      case '\n':
        ++line;
        end_record();
        break;
      default:
        field.push_back(c);
        field_started = true;
        record_has_content = true;
    }
  }
  if (in_quotes) {
    throw InputError(path.string() + ":" + std::to_string(current.line) + ": unterminated quoted field");
  }
  if (field_started || !current.fields.empty()) {
    end_record();
  }
  return records;
}

std::string default_name(const fs::path& path, const LoadOptions& options) {
  if (!options.name.empty()) return options.name;
  return path.filename().replace_extension().string();
}

void check_text(const Document& doc, const LoadOptions& options, const std::string& where) {
  if (!options.allow_empty && blank(doc.text)) {
    throw InputError(where + ": document '" + doc.id + "' has empty text (set allow_empty to keep it)");
  }
}

Label label_at(std::string_view text, const std::string& where) {
  try {
    return parse_label(text);
  } catch (const InputError& e) {
    throw InputError(where + ": " + e.what());
  }
}

Corpus load_csv(const fs::path& path, const LoadOptions& options) {
  const auto records = parse_csv(read_file(path), path);
  const std::string name = default_name(path, options);
  if (records.empty()) {
    return Corpus(name, {});
  }
  std::map<std::string, std::size_t> columns;
  const auto& header = records.front().fields;
  for (std::size_t i = 0; i < header.size(); ++i) {
    columns.emplace(lower(header[i]), i);
  }
  const auto find = [&](std::initializer_list<const char*> names) -> std::optional<std::size_t> {
    for (const char* n : names) {
      if (auto it = columns.find(n); it != columns.end()) return it->second;
    }
    return std::nullopt;
  };
  auto id_col = find({"id", "", "unnamed: 0"});
  const auto text_col = find({"text", "content", "body", "article"});
  const auto label_col = find({"label", "class"});
  const auto source_col = find({"source"});
  const auto title_col = find({"title", "headline"});
  const auto url_col = find({"origin_url", "url"});
  if (!text_col) {
    throw InputError(path.string() + ":1: CSV header has no text column");
  }
  if (!label_col && !options.default_label) {
    throw InputError(path.string() + ":1: CSV header has no label column and no default label was given");
  }

  std::vector<Document> docs;
  docs.reserve(records.size() - 1);
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    const std::string where = path.string() + ":" + std::to_string(rec.line);
    if (rec.fields.size() != header.size()) {
      throw InputError(where + ": expected " + std::to_string(header.size()) + " fields, found " +
                       std::to_string(rec.fields.size()));
    }
    Document doc;
    doc.id = id_col && !rec.fields[*id_col].empty() ? rec.fields[*id_col] : name + ":" + std::to_string(r);
    doc.text = rec.fields[*text_col];
    doc.label = label_col ? label_at(rec.fields[*label_col], where) : *options.default_label;
    doc.source = options.default_source;
    if (source_col) {
      try {
        doc.source = rec.fields[*source_col].empty() ? options.default_source : parse_source(rec.fields[*source_col]);
      } catch (const InputError& e) {
        throw InputError(where + ": " + e.what());
      }
    }
    if (title_col && !rec.fields[*title_col].empty()) doc.title = rec.fields[*title_col];
    if (url_col && !rec.fields[*url_col].empty()) doc.origin_url = rec.fields[*url_col];
    check_text(doc, options, where);
    docs.push_back(std::move(doc));
  }
  try {
    return Corpus(name, std::move(docs));
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

std::optional<std::string> optional_string(const json& obj, const char* key, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw InputError(where + ": field '" + key + "' must be a string");
  return it->get<std::string>();
}

Corpus load_jsonl(const fs::path& path, const LoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw InputError("cannot open " + path.string());
  }
  const std::string name = default_name(path, options);
  std::vector<Document> docs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (blank(line)) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::parse_error& e) {
      throw InputError(where + ": invalid JSON: " + e.what());
    }
    if (!obj.is_object()) throw InputError(where + ": record is not a JSON object");

    Document doc;
    if (const auto it = obj.find("id"); it != obj.end() && !it->is_null()) {
      if (it->is_string()) {
        doc.id = it->get<std::string>();
      } else if (it->is_number_integer()) {
        doc.id = std::to_string(it->get<long long>());
      } else {
        throw InputError(where + ": field 'id' must be a string or integer");
      }
    } else {
      doc.id = name + ":" + std::to_string(line_no);
    }
    const auto text = optional_string(obj, "text", where);
    if (!text) throw InputError(where + ": missing field 'text'");
    doc.text = *text;
    if (const auto it = obj.find("label"); it != obj.end() && !it->is_null()) {
      if (it->is_string()) {
        doc.label = label_at(it->get<std::string>(), where);
      } else if (it->is_number_integer()) {
        doc.label = label_at(std::to_string(it->get<long long>()), where);
      } else {
        throw InputError(where + ": field 'label' must be a string or integer");
      }
    } else if (options.default_label) {
      doc.label = *options.default_label;
    } else {
      throw InputError(where + ": missing field 'label'");
    }
    doc.source = options.default_source;
    if (const auto source = optional_string(obj, "source", where)) {
      try {
        doc.source = parse_source(*source);
      } catch (const InputError& e) {
        throw InputError(where + ": " + e.what());
      }
    }
    doc.title = optional_string(obj, "title", where);
    doc.origin_url = optional_string(obj, "origin_url", where);
    check_text(doc, options, where);
    docs.push_back(std::move(doc));
  }
  try {
    return Corpus(name, std::move(docs));
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

Corpus load_flat_dir(const fs::path& root, const LoadOptions& options) {
  std::vector<Document> docs;
  std::vector<fs::path> subdirs;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory()) subdirs.push_back(entry.path());
  }
  std::sort(subdirs.begin(), subdirs.end());
  for (const auto& dir : subdirs) {
    const std::string dirname = lower(dir.filename().string());
    if (dirname != "fake" && dirname != "real") continue;
    const Label label = parse_label(dirname);
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.is_regular_file()) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
      Document doc;
      doc.id = dir.filename().string() + "/" + file.filename().string();
      doc.text = read_file(file);
      doc.label = label;
      doc.source = options.default_source;
      check_text(doc, options, file.string());
      docs.push_back(std::move(doc));
    }
  }
  return Corpus(default_name(root, options), std::move(docs));
}

std::size_t round_count(double x) { return static_cast<std::size_t>(std::llround(x)); }

std::vector<std::size_t> shuffled_indices(std::size_t n, Rng& rng) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  rng.shuffle(std::span(idx));
  return idx;
}

// Keeps `keep` documents of `label`, chosen by `rng`, in original order.
std::vector<bool> choose(const Corpus& corpus, Label label, std::size_t keep, Rng& rng) {
  std::vector<std::size_t> members;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (corpus[i].label == label) members.push_back(i);
  }
  rng.shuffle(std::span(members));
  std::vector<bool> chosen(corpus.size(), false);
  for (std::size_t k = 0; k < keep && k < members.size(); ++k) chosen[members[k]] = true;
  return chosen;
}

}  // namespace

CorpusFormat infer_format(const fs::path& path) {
  if (fs::is_directory(path)) return CorpusFormat::FlatDir;
  if (lower(path.extension().string()) == ".csv") return CorpusFormat::Csv;
  return CorpusFormat::Jsonl;
}

Corpus load_corpus(const fs::path& path, CorpusFormat format, const LoadOptions& options) {
  if (!fs::exists(path)) {
    throw InputError("no such file or directory: " + path.string());
  }
  switch (format) {
    case CorpusFormat::Csv:
      return load_csv(path, options);
    case CorpusFormat::Jsonl:
      return load_jsonl(path, options);
    case CorpusFormat::FlatDir:
      if (!fs::is_directory(path)) throw InputError(path.string() + " is not a directory");
      return load_flat_dir(path, options);
  }
  throw InputError("unknown corpus format");
}

Corpus load_corpus(const fs::path& path, const LoadOptions& options) {
  if (!fs::exists(path)) {
    throw InputError("no such file or directory: " + path.string());
  }
  return load_corpus(path, infer_format(path), options);
}

std::string to_jsonl(const Corpus& corpus) {
  std::string out;
  for (const auto& doc : corpus) {
    json obj = json::object();
    obj["id"] = doc.id;
    obj["text"] = doc.text;
    obj["label"] = to_string(doc.label);
    obj["source"] = to_string(doc.source);
    if (doc.title) obj["title"] = *doc.title;
    if (doc.origin_url) obj["origin_url"] = *doc.origin_url;
    out += obj.dump(-1, ' ', false, json::error_handler_t::strict);
    out += '\n';
  }
  return out;
}

void save_jsonl(const Corpus& corpus, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << to_jsonl(corpus);
  if (!out) throw Error("write failed: " + path.string());
}

std::string content_hash(const Corpus& corpus) { return sha256_hex(to_jsonl(corpus)); }

Corpus concat(std::string name, const std::vector<const Corpus*>& parts, SplitRole role) {
  std::vector<Document> docs;
  for (const Corpus* part : parts) {
    docs.insert(docs.end(), part->begin(), part->end());
  }
  return Corpus(std::move(name), std::move(docs), role);
}

Corpus with_role(const Corpus& corpus, SplitRole role) { return Corpus(corpus.name(), corpus.documents(), role); }

CorpusStats summarize(const Corpus& corpus) {
  CorpusStats stats;
  stats.article_count = corpus.size();
  if (corpus.empty()) return stats;

  std::vector<std::size_t> lengths;
  lengths.reserve(corpus.size());
  std::size_t total_len = 0;
  stats.min_len = std::numeric_limits<std::size_t>::max();
  stats.unique_per_article_min = std::numeric_limits<std::size_t>::max();
  for (const auto& doc : corpus) {
    const auto tokens = clean_tokens(doc.text);
    const std::unordered_set<std::string_view> unique(tokens.begin(), tokens.end());
    lengths.push_back(tokens.size());
    total_len += tokens.size();
    stats.min_len = std::min(stats.min_len, tokens.size());
    stats.max_len = std::max(stats.max_len, tokens.size());
    stats.unique_tokens_total += unique.size();
    stats.unique_per_article_min = std::min(stats.unique_per_article_min, unique.size());
    stats.unique_per_article_max = std::max(stats.unique_per_article_max, unique.size());
    if (tokens.size() > 500) ++stats.above_500;
  }
  const auto n = static_cast<double>(corpus.size());
  stats.mean_len = static_cast<double>(total_len) / n;
  stats.unique_per_article_mean = static_cast<double>(stats.unique_tokens_total) / n;
  // Integer comparison (len * n > total) avoids rounding at the mean.
  for (const auto len : lengths) {
    if (len * corpus.size() > total_len) ++stats.above_mean;
  }
  return stats;
}

ClassStats summarize_per_class(const Corpus& corpus) {
  std::vector<Document> fake;
  std::vector<Document> real;
  for (const auto& doc : corpus) {
    (doc.label == Label::Fake ? fake : real).push_back(doc);
  }
  return {summarize(Corpus(corpus.name(), std::move(fake))), summarize(Corpus(corpus.name(), std::move(real)))};
}

json stats_to_json(const CorpusStats& s) {
  json j = json::object();
  j["Article Count"] = s.article_count;
  j["Mean Article Length"] = s.mean_len;
  j["Min Article Length"] = s.min_len;
  j["Max Article Length"] = s.max_len;
  j["Articles Above Mean"] = s.above_mean;
  j["Articles Above 500"] = s.above_500;
  j["Unique Tokens"] = s.unique_tokens_total;
  j["Unique Tokens Per Article Mean"] = s.unique_per_article_mean;
  j["Unique Tokens Per Article Min"] = s.unique_per_article_min;
  j["Unique Tokens Per Article Max"] = s.unique_per_article_max;
  return j;
}

std::string format_stats_table(const std::vector<std::pair<std::string, CorpusStats>>& columns) {
  static const std::array<const char*, 10> kRows = {
      "Article Count",      "Mean Article Length", "Min Article Length",
      "Max Article Length", "Articles Above Mean", "Articles Above 500",
      "Unique Tokens",      "Unique Tokens Per Article Mean",
      "Unique Tokens Per Article Min", "Unique Tokens Per Article Max"};
  const auto cell = [](const CorpusStats& s, std::size_t row) {
    std::ostringstream os;
    switch (row) {
      case 0: os << s.article_count; break;
      case 1: os << std::fixed << std::setprecision(2) << s.mean_len; break;
      case 2: os << s.min_len; break;
      case 3: os << s.max_len; break;
      case 4: os << s.above_mean; break;
      case 5: os << s.above_500; break;
      case 6: os << s.unique_tokens_total; break;
      case 7: os << std::fixed << std::setprecision(2) << s.unique_per_article_mean; break;
      case 8: os << s.unique_per_article_min; break;
      default: os << s.unique_per_article_max; break;
    }
    return os.str();
  };

  std::size_t label_width = 0;
  for (const char* r : kRows) label_width = std::max(label_width, std::string_view(r).size());
  std::vector<std::size_t> widths;
  for (const auto& [name, stats] : columns) {
    std::size_t w = name.size();
    for (std::size_t r = 0; r < kRows.size(); ++r) w = std::max(w, cell(stats, r).size());
    widths.push_back(w);
  }

  std::ostringstream os;
  os << std::left << std::setw(static_cast<int>(label_width)) << "";
  for (std::size_t c = 0; c < columns.size(); ++c) {
    os << "  " << std::right << std::setw(static_cast<int>(widths[c])) << columns[c].first;
  }
  os << '\n';
  for (std::size_t r = 0; r < kRows.size(); ++r) {
    os << std::left << std::setw(static_cast<int>(label_width)) << kRows[r];
    for (std::size_t c = 0; c < columns.size(); ++c) {
      os << "  " << std::right << std::setw(static_cast<int>(widths[c])) << cell(columns[c].second, r);
    }
    os << '\n';
  }
  return os.str();
}

std::vector<WordCount> top_words(const Corpus& corpus, std::size_t n, const StopwordSet& stopwords) {
  if (n == 0) throw InputError("top_words: n must be at least 1");
  std::unordered_map<std::string, std::size_t> counts;
  for (const auto& doc : corpus) {
    for (auto& token : clean_tokens(doc.text)) {
      if (!stopwords.contains(token)) ++counts[std::move(token)];
    }
  }
  std::vector<WordCount> ranked(counts.begin(), counts.end());
  const auto order = [](const WordCount& a, const WordCount& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  };
  const std::size_t keep = std::min(n, ranked.size());
  std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(keep), ranked.end(), order);
  ranked.resize(keep);
  return ranked;
}

CorpusSplit split(const Corpus& corpus, double test_fraction, std::uint64_t seed, bool stratified) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw InputError("split: test_fraction must be in (0, 1)");
  }
  Rng rng(seed, "corpus-split");
  std::vector<bool> in_test(corpus.size(), false);
  if (stratified) {
    for (const Label label : {Label::Fake, Label::Real}) {
      const std::size_t n = corpus.count(label);
      if (n == 0) continue;
      if (n < 2) {
        throw InputError("split: class '" + std::string(to_string(label)) + "' has fewer than 2 documents");
      }
      const std::size_t n_test = std::clamp<std::size_t>(round_count(test_fraction * static_cast<double>(n)), 1, n - 1);
      const auto chosen = choose(corpus, label, n_test, rng);
      for (std::size_t i = 0; i < corpus.size(); ++i) {
        if (chosen[i]) in_test[i] = true;
      }
    }
  } else {
    const std::size_t n = corpus.size();
    if (n < 2) throw InputError("split: corpus needs at least 2 documents");
    const std::size_t n_test = std::clamp<std::size_t>(round_count(test_fraction * static_cast<double>(n)), 1, n - 1);
    const auto order = shuffled_indices(n, rng);
    for (std::size_t k = 0; k < n_test; ++k) in_test[order[k]] = true;
  }
  std::vector<Document> train;
  std::vector<Document> test;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    (in_test[i] ? test : train).push_back(corpus[i]);
  }
  return {Corpus(corpus.name() + "/train", std::move(train), SplitRole::Train),
          Corpus(corpus.name() + "/test", std::move(test), SplitRole::Test)};
}

Corpus rebalance(const Corpus& corpus, double real_per_fake, std::uint64_t seed) {
  if (!(real_per_fake > 0.0) || !std::isfinite(real_per_fake)) {
    throw InputError("rebalance: ratio must be positive");
  }
  const std::size_t n_fake = corpus.count(Label::Fake);
  const std::size_t n_real = corpus.count(Label::Real);
  bool keep_fake;
  if (real_per_fake > 1.0) {
    keep_fake = true;
  } else if (real_per_fake < 1.0) {
    keep_fake = false;
  } else {
    keep_fake = n_fake <= n_real;
  }
  std::size_t want_fake = n_fake;
  std::size_t want_real = n_real;
  if (keep_fake) {
    want_real = round_count(real_per_fake * static_cast<double>(n_fake));
    if (want_real > n_real) {
      throw InputError("rebalance: ratio " + std::to_string(real_per_fake) + " needs " + std::to_string(want_real) +
                       " real documents, only " + std::to_string(n_real) + " available");
    }
  } else {
    want_fake = round_count(static_cast<double>(n_real) / real_per_fake);
    if (want_fake > n_fake) {
      throw InputError("rebalance: ratio " + std::to_string(real_per_fake) + " needs " + std::to_string(want_fake) +
                       " fake documents, only " + std::to_string(n_fake) + " available");
    }
  }
  Rng rng(seed, "rebalance");
  const auto fake = choose(corpus, Label::Fake, want_fake, rng);
  const auto real = choose(corpus, Label::Real, want_real, rng);
  std::vector<Document> docs;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (fake[i] || real[i]) docs.push_back(corpus[i]);
  }
  return Corpus(corpus.name(), std::move(docs), corpus.role());
}

}  // namespace fakenews
