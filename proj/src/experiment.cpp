#include "fakenews/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <sstream>
#include <thread>

#include "fakenews/config.hpp"

namespace fakenews {
namespace {

std::string_view to_string(Subset s) {
  switch (s) {
    case Subset::Full:
      return "full";
    case Subset::Subset1:
      return "subset1";
    case Subset::Subset2:
      return "subset2";
  }
  return "?";
}

Subset parse_subset(std::string_view text, const std::string& where) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "full") return Subset::Full;
  if (lower == "subset1") return Subset::Subset1;
  if (lower == "subset2") return Subset::Subset2;
  throw InputError(where + ": unknown subset '" + std::string(text) + "' (expected full, subset1 or subset2)");
}

Corpus select(const CorpusSelector& sel, const ExperimentSpec& spec, const CorpusRegistry& corpora,
              SplitRole role) {
  if (sel.corpora.empty()) {
    throw InputError("experiment '" + spec.name + "': no " + (role == SplitRole::Test ? "test" : "training") +
                     " corpus selected");
  }
  std::vector<Document> docs;
  for (const auto& name : sel.corpora) {
    const auto it = corpora.find(name);
    if (it == corpora.end()) throw InputError("experiment '" + spec.name + "': corpus " + name + " is not loaded");
    const Corpus* part = &it->second;
    CorpusSplit halves;
    if (sel.subset != Subset::Full) {
      halves = split(*part, spec.test_fraction, spec.seed_base);
      part = sel.subset == Subset::Subset1 ? &halves.train : &halves.test;
    }
    for (const auto& doc : *part) {
      docs.push_back(doc);
      // Ids are only unique within one corpus.
      if (sel.corpora.size() > 1) docs.back().id = name + "/" + doc.id;
    }
  }
  return Corpus(sel.label(), std::move(docs), role);
}

nlohmann::json optional_ratio(std::optional<double> v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }

}  // namespace

std::string CorpusSelector::label() const {
  std::string out;
  for (std::size_t i = 0; i < corpora.size(); ++i) out += (i == 0 ? "" : " and ") + corpora[i];
  if (subset == Subset::Subset1) out += " Subset1";
  if (subset == Subset::Subset2) out += " Subset2";
  return out;
}

nlohmann::json CorpusSelector::to_json() const { return {{"corpora", corpora}, {"subset", to_string(subset)}}; }

CorpusSelector CorpusSelector::from_json(const nlohmann::json& j, const std::string& where) {
  CorpusSelector sel;
  if (j.is_string()) {
    const auto text = j.get<std::string>();
    const auto slash = text.find('/');
    std::string names = text.substr(0, slash);
    if (slash != std::string::npos) sel.subset = parse_subset(text.substr(slash + 1), where);
    std::stringstream ss(names);
    for (std::string name; std::getline(ss, name, '+');) {
      if (name.empty()) throw InputError(where + ": empty corpus name in '" + text + "'");
      sel.corpora.push_back(name);
    }
  } else {
    ObjectReader r(j, where);
    std::string subset = "full";
    r.require("corpora", sel.corpora).read("subset", subset).finish();
    sel.subset = parse_subset(subset, where);
  }
  if (sel.corpora.empty()) throw InputError(where + ": no corpora selected");
  return sel;
}

nlohmann::json ExperimentSpec::to_json() const {
  return {{"name", name},
          {"model", model.to_json()},
          {"train", train.to_json()},
          {"test", test.to_json()},
          {"augment", augment},
          {"augment_options",
           {{"copies_per_doc", augment_options.copies_per_doc}, {"replace_prob", augment_options.replace_prob}}},
          {"imbalance", optional_ratio(imbalance)},
          {"repetitions", repetitions},
          {"seed_base", seed_base},
          {"test_fraction", test_fraction}};
}

ExperimentSpec ExperimentSpec::from_json(const nlohmann::json& j, const std::string& where) {
  ExperimentSpec spec;
  ObjectReader r(j, where);
  r.read("name", spec.name);
  if (const auto* v = r.find("model")) spec.model = ModelConfig::from_json(*v, r.path("model"));
  if (const auto* v = r.find("train")) spec.train = CorpusSelector::from_json(*v, r.path("train"));
  if (const auto* v = r.find("test")) spec.test = CorpusSelector::from_json(*v, r.path("test"));
  r.read("augment", spec.augment);
  if (const auto* v = r.find("augment_options")) {
    ObjectReader(*v, r.path("augment_options"))
        .read("copies_per_doc", spec.augment_options.copies_per_doc)
        .read("replace_prob", spec.augment_options.replace_prob)
        .finish();
  }
  if (const auto* v = r.find("imbalance"); v != nullptr && !v->is_null()) {
    if (!v->is_number()) throw InputError(r.path("imbalance") + ": expected a number or null");
    spec.imbalance = v->get<double>();
  }
  r.read("repetitions", spec.repetitions).read("seed_base", spec.seed_base).read("test_fraction", spec.test_fraction);
  r.finish();
  if (spec.name.empty()) spec.name = std::string(to_string(spec.model.kind));
  if (spec.repetitions == 0) throw InputError(where + ".repetitions: must be at least 1");
  if (!(spec.test_fraction > 0.0 && spec.test_fraction < 1.0)) {
    throw InputError(where + ".test_fraction: must be in (0, 1)");
  }
  if (!(spec.augment_options.replace_prob >= 0.0 && spec.augment_options.replace_prob <= 1.0)) {
    throw InputError(where + ".augment_options.replace_prob: must be in [0, 1]");
  }
  return spec;
}

Corpus resolve_selector(const CorpusSelector& selector, const ExperimentSpec& spec, const CorpusRegistry& corpora,
                        SplitRole role) {
  return select(selector, spec, corpora, role);
}

ResolvedData resolve_data(const ExperimentSpec& spec, const CorpusRegistry& corpora) {
  for (const auto& a : spec.train.corpora) {
    for (const auto& b : spec.test.corpora) {
      if (a != b) continue;
      const bool disjoint = (spec.train.subset == Subset::Subset1 && spec.test.subset == Subset::Subset2) ||
                            (spec.train.subset == Subset::Subset2 && spec.test.subset == Subset::Subset1);
      if (!disjoint) {
        throw InputError("experiment '" + spec.name + "': train (" + spec.train.label() + ") and test (" +
                         spec.test.label() + ") overlap on " + a);
      }
    }
  }
  return {select(spec.train, spec, corpora, SplitRole::Train), select(spec.test, spec, corpora, SplitRole::Test)};
}

nlohmann::json ExperimentResult::to_json() const {
  nlohmann::json run_list = nlohmann::json::array();
  for (const auto& r : runs) {
    run_list.push_back(
        {{"seed", r.seed}, {"train_size", r.train_size}, {"model_hash", r.model_hash}, {"metrics", fakenews::to_json(r.metrics)}});
  }
  nlohmann::json out = {{"spec", spec.to_json()},
                        {"runs", run_list},
                        {"mean", runs.empty() ? nlohmann::json(nullptr) : fakenews::to_json(mean)},
                        {"peak", runs.empty() ? nlohmann::json(nullptr) : nlohmann::json(peak_accuracy)},
                        {"provenance", provenance}};
  if (error) out["error"] = *error;
  return out;
}

ExperimentResult run_experiment(const ExperimentSpec& spec, const CorpusRegistry& corpora,
                                const SynonymLexicon* lexicon) {
  if (spec.augment && lexicon == nullptr) {
    throw InputError("experiment '" + spec.name + "': augmentation needs a synonym lexicon");
  }
  ExperimentResult result;
  result.spec = spec;
  const auto data = resolve_data(spec, corpora);

  nlohmann::json corpus_hashes = nlohmann::json::object();
  for (const auto* sel : {&spec.train, &spec.test}) {
    for (const auto& name : sel->corpora) corpus_hashes[name] = content_hash(corpora.at(name));
  }
  nlohmann::json seeds = nlohmann::json::array();
  for (std::size_t r = 0; r < spec.repetitions; ++r) seeds.push_back(spec.seed_base + r);
  result.provenance = {{"version", kVersion},
                       {"config_hash", json_hash(spec.to_json())},
                       {"corpus_hashes", corpus_hashes},
                       {"split_seed", spec.seed_base},
                       {"seeds", seeds}};

  for (std::size_t r = 0; r < spec.repetitions; ++r) {
    const std::uint64_t seed = spec.seed_base + r;
    Corpus train = data.train;
    if (spec.imbalance) train = rebalance(train, *spec.imbalance, seed);
    CorpusTransform expand;
    if (spec.augment) {
      expand = [&](const Corpus& c) { return augment_corpus(c, *lexicon, spec.augment_options, seed); };
    }
    RunResult run;
    run.seed = seed;
    try {
      const auto trained = train_classifier(spec.model, train, seed, result.provenance, expand);
      run.train_size = trained.classifier.training_meta().value("train_size", std::size_t{0});
      run.model_hash = trained.classifier.hash();
      run.metrics = evaluate([&](const Document& d) { return trained.classifier.predict_proba(d); }, data.test);
    } catch (const TrainingError& e) {
      result.error = "run with seed " + std::to_string(seed) + " diverged: " + e.what();
      break;
    }
    result.runs.push_back(std::move(run));
  }

  std::vector<Metrics> metrics;
  for (const auto& run : result.runs) {
    metrics.push_back(run.metrics);
    result.peak_accuracy = std::max(result.peak_accuracy, run.metrics.accuracy);
  }
  result.mean = mean_metrics(metrics);
  return result;
}

std::vector<ExperimentResult> run_matrix(const std::vector<ExperimentSpec>& specs, const CorpusRegistry& corpora,
                                         const SynonymLexicon* lexicon, std::size_t jobs) {
  std::vector<ExperimentResult> results(specs.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < specs.size(); i = next++) {
      try {
        results[i] = run_experiment(specs[i], corpora, lexicon);
      } catch (const std::exception& e) {
        results[i].spec = specs[i];
        results[i].error = e.what();
      }
    }
  };
  const std::size_t n = std::clamp<std::size_t>(jobs, 1, std::max<std::size_t>(specs.size(), 1));
  std::vector<std::jthread> pool;
  for (std::size_t t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  return results;
}

std::string format_matrix(const std::vector<ExperimentResult>& results) {
  const std::vector<std::string> header{"Model",   "Data Trained", "Data Tested", "Average Accuracy",
                                        "F1 Score", "Per Class Accuracy"};
  std::vector<std::vector<std::string>> rows{header};
  for (const auto& r : results) {
    std::vector<std::string> row{r.spec.name, r.spec.train.label(), r.spec.test.label()};
    if (r.runs.empty()) {
      row.insert(row.end(), {"ERROR", "ERROR", r.error.value_or("no runs")});
    } else {
      row.push_back(format_ratio(r.mean.accuracy) + (r.error ? " (partial)" : ""));
      row.push_back(format_ratio(r.mean.f1));
      row.push_back("Fake: " + format_ratio(r.mean.fake_accuracy) + " | Real: " + format_ratio(r.mean.real_accuracy));
    }
    rows.push_back(std::move(row));
  }
  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  }
  std::ostringstream out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t c = 0; c < rows[i].size(); ++c) {
      out << rows[i][c];
      if (c + 1 < rows[i].size()) out << std::string(width[c] - rows[i][c].size() + 2, ' ');
    }
    out << '\n';
    if (i == 0) {
      std::size_t total = 0;
      for (std::size_t c = 0; c < width.size(); ++c) total += width[c] + (c + 1 < width.size() ? 2 : 0);
      out << std::string(total, '-') << '\n';
    }
  }
  return out.str();
}

nlohmann::json matrix_to_json(const std::vector<ExperimentResult>& results) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : results) rows.push_back(r.to_json());
  return {{"version", kVersion}, {"rows", rows}};
}

std::vector<ExperimentSpec> reproduction_matrix(std::uint64_t seed_base, std::size_t repetitions) {
  const auto sel = [](std::vector<std::string> names, Subset subset) { return CorpusSelector{std::move(names), subset}; };
  const auto row = [&](std::string name, ModelKind kind, CorpusSelector train, CorpusSelector test,
                       std::optional<double> imbalance, bool augment) {
    ExperimentSpec s;
    s.name = std::move(name);
    s.model = ModelConfig::defaults(kind);
    s.train = std::move(train);
    s.test = std::move(test);
    s.imbalance = imbalance;
    s.augment = augment;
    s.repetitions = repetitions;
    s.seed_base = seed_base;
    return s;
  };
  const auto lr = ModelKind::Logistic;
  const auto lstm = ModelKind::Lstm;
  const auto s1 = Subset::Subset1;
  const auto s2 = Subset::Subset2;
  const auto full = Subset::Full;
  const std::string base = "Logistic Regression (Base)";
  const std::string balanced = "LSTM (Base - Balanced Classes)";
  const std::string imbalanced = "LSTM (Class Imbalance)";
  const std::string augmented = "LSTM (Wordnet Augmentation)";
  return {
      row(base, lr, sel({"US1"}, s1), sel({"US1"}, s2), 1.0, false),
      row(base, lr, sel({"US1"}, s1), sel({"SA1"}, full), 1.0, false),
      row(base, lr, sel({"SA1"}, s1), sel({"SA1"}, s2), 1.0, false),
      row(base, lr, sel({"SA1"}, s1), sel({"US1"}, full), 1.0, false),
      row(balanced, lstm, sel({"SA1"}, s1), sel({"SA1"}, s2), 1.0, false),
      row(balanced, lstm, sel({"US1"}, s1), sel({"US1"}, s2), 1.0, false),
      row(imbalanced, lstm, sel({"SA1"}, s1), sel({"SA1"}, s2), std::nullopt, false),
      row(imbalanced, lstm, sel({"SA1"}, s1), sel({"US1"}, full), std::nullopt, false),
      row("LSTM", lstm, sel({"US1"}, s1), sel({"SA1"}, full), std::nullopt, false),
      row(augmented, lstm, sel({"SA1"}, s1), sel({"SA1"}, s2), std::nullopt, true),
      row(augmented, lstm, sel({"SA1"}, s1), sel({"US1"}, full), std::nullopt, true),
      row(augmented, lstm, sel({"US1"}, s1), sel({"US1"}, s2), std::nullopt, true),
      row(augmented, lstm, sel({"US1"}, s1), sel({"SA1"}, full), std::nullopt, true),
      row(augmented, lstm, sel({"SA1", "US1"}, s1), sel({"SA1", "US1"}, s2), std::nullopt, true),
      row("LSTM", lstm, sel({"US2"}, s1), sel({"US2"}, s2), std::nullopt, false),
      row("LSTM", lstm, sel({"US2"}, s1), sel({"SA1"}, full), std::nullopt, false),
  };
}

}  // namespace fakenews
