#include "fakenews/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include "fakenews/augment.hpp"
#include "fakenews/config.hpp"
#include "fakenews/explain.hpp"
#include "fakenews/hash.hpp"
#include "fakenews/text.hpp"

namespace fakenews {
namespace fs = std::filesystem;
namespace {

std::string read_all(std::istream& in) { return {std::istreambuf_iterator<char>(in), {}}; }

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << text;
  if (!out) throw Error("write failed: " + path.string());
}

void write_json(const fs::path& path, const nlohmann::json& j) { write_text(path, j.dump(2) + "\n"); }

Source source_for(const std::string& name) {
  try {
    return parse_source(name);
  } catch (const InputError&) {
    return Source::Other;
  }
}

nlohmann::json corpus_hashes(const CorpusRegistry& registry) {
  nlohmann::json out = nlohmann::json::object();
  for (const auto& [name, corpus] : registry) out[name] = content_hash(corpus);
  return out;
}

SynonymLexicon open_lexicon(const RunConfig& config) {
  return load_lexicon(config.lexicon.value_or(data_dir() / "synonyms.tsv"));
}

// Where outputs go does not change what they contain.
std::string config_hash(const RunConfig& config) {
  auto j = config.to_json();
  j.erase("output_dir");
  return json_hash(j);
}

Corpus class_subset(const Corpus& corpus, Label label) {
  std::vector<Document> docs;
  for (const auto& d : corpus) {
    if (d.label == label) docs.push_back(d);
  }
  return Corpus(corpus.name() + " " + std::string(to_string(label)), std::move(docs));
}

// Shared state of one invocation: parsed flags layered over the config file.
struct Invocation {
  std::string config_path;
  std::vector<std::string> corpus_flags;
  std::string output_dir;
  std::string lexicon;
  std::size_t jobs = 0;
  std::optional<std::uint64_t> seed;
  std::string kind;
  std::string train_sel;
  std::string test_sel;
  bool augment = false;
  std::optional<std::size_t> copies;
  std::optional<double> replace_prob;
  std::optional<double> imbalance;
  std::optional<std::size_t> repetitions;
  std::optional<double> test_fraction;

  RunConfig resolve() const {
    RunConfig config = config_path.empty() ? RunConfig{} : RunConfig::load(config_path);
    for (const auto& c : corpus_flags) config.corpora.push_back(CorpusEntry::parse(c));
    if (!output_dir.empty()) config.output_dir = output_dir;
    if (!lexicon.empty()) config.lexicon = lexicon;
    if (jobs > 0) config.jobs = jobs;
    auto& spec = config.experiment;
    if (!kind.empty()) {
      spec.model = ModelConfig::defaults(parse_model_kind(kind));
      if (spec.name.empty() || spec.name == "logistic") spec.name = kind;
    }
    if (seed) {
      spec.seed_base = *seed;
      for (auto& s : config.matrix) s.seed_base = *seed;
    }
    if (!train_sel.empty()) spec.train = CorpusSelector::from_json(train_sel, "--train");
    if (!test_sel.empty()) spec.test = CorpusSelector::from_json(test_sel, "--test");
    if (augment) spec.augment = true;
    if (copies) spec.augment_options.copies_per_doc = *copies;
    if (replace_prob) spec.augment_options.replace_prob = *replace_prob;
    if (imbalance) spec.imbalance = *imbalance;
    if (repetitions) {
      spec.repetitions = *repetitions;
      for (auto& s : config.matrix) s.repetitions = *repetitions;
    }
    if (test_fraction) spec.test_fraction = *test_fraction;
    if (spec.name.empty()) spec.name = std::string(to_string(spec.model.kind));
    return config;
  }
};

void add_common(CLI::App* cmd, Invocation& inv) {
  cmd->add_option("--config", inv.config_path, "JSON run configuration");
  cmd->add_option("--corpus", inv.corpus_flags, "NAME[:LABEL]=PATH; repeatable");
  cmd->add_option("--out-dir", inv.output_dir, "Output directory");
  cmd->add_option("--seed", inv.seed, "Global seed");
}

void add_experiment(CLI::App* cmd, Invocation& inv) {
  cmd->add_option("--kind", inv.kind, "logistic | passive_aggressive | lstm");
  cmd->add_option("--train", inv.train_sel, "Training selector, e.g. SA1/subset1 or SA1+US1/subset1");
  cmd->add_option("--test", inv.test_sel, "Test selector, e.g. SA1/subset2");
  cmd->add_flag("--augment", inv.augment, "Synonym-augment the training data");
  cmd->add_option("--copies", inv.copies, "Augmented copies per document");
  cmd->add_option("--replace-prob", inv.replace_prob, "Per-token synonym replacement probability");
  cmd->add_option("--lexicon", inv.lexicon, "Synonym lexicon TSV");
  cmd->add_option("--imbalance", inv.imbalance, "Real documents per fake document in the training data");
  cmd->add_option("--test-fraction", inv.test_fraction, "Subset2 share of each corpus");
}

int cmd_stats(const Invocation& inv, bool as_json, std::size_t top_n, std::ostream& out) {
  const RunConfig config = inv.resolve();
  if (config.corpora.empty()) throw InputError("stats: no corpus given");
  const auto registry = load_registry(config.corpora);
  std::vector<std::pair<std::string, CorpusStats>> columns;
  nlohmann::json j = {{"version", kVersion}, {"corpus_hashes", corpus_hashes(registry)}};
  for (const auto& [name, corpus] : registry) {
    const auto stats = summarize_per_class(corpus);
    for (const Label label : {Label::Fake, Label::Real}) {
      const std::string column = name + " " + std::string(to_string(label));
      const auto& s = label == Label::Fake ? stats.fake : stats.real;
      columns.emplace_back(column, s);
      j["columns"][column] = stats_to_json(s);
      if (top_n > 0) {
        nlohmann::json words = nlohmann::json::array();
        for (const auto& [w, c] : top_words(class_subset(corpus, label), top_n, default_stopwords())) {
          words.push_back({w, c});
        }
        j["top_words"][column] = words;
      }
    }
  }
  if (as_json) {
    out << j.dump(2) << '\n';
    return 0;
  }
  out << format_stats_table(columns);
  if (top_n > 0) {
    for (const auto& [column, words] : j["top_words"].items()) {
      out << "\nTop " << top_n << " words, " << column << ":\n";
      for (const auto& w : words) out << "  " << w[0].get<std::string>() << ' ' << w[1].get<std::size_t>() << '\n';
    }
  }
  return 0;
}

int cmd_train(const Invocation& inv, std::ostream& out) {
  RunConfig config = inv.resolve();
  const auto& spec = config.experiment;
  const auto registry = load_registry(config.corpora);
  Corpus train = resolve_selector(spec.train, spec, registry, SplitRole::Train);
  const std::uint64_t seed = spec.seed_base;
  if (spec.imbalance) train = rebalance(train, *spec.imbalance, seed);
  std::optional<SynonymLexicon> lexicon;
  CorpusTransform expand;
  if (spec.augment) {
    lexicon = open_lexicon(config);
    expand = [&](const Corpus& c) { return augment_corpus(c, *lexicon, spec.augment_options, seed); };
  }
  const nlohmann::json resolved = config.to_json();
  nlohmann::json hashes = nlohmann::json::object();
  for (const auto& name : spec.train.corpora) hashes[name] = content_hash(registry.at(name));
  const nlohmann::json provenance = {
      {"version", kVersion}, {"config_hash", config_hash(config)}, {"corpus_hashes", hashes}, {"seeds", {seed}}};

  auto trained = train_classifier(spec.model, train, seed, provenance, expand);
  const auto& clf = trained.classifier;
  const fs::path model_path =
      config.output_dir / (clf.kind() == ModelKind::Lstm ? "model.lstm" : "model.json");
  fs::create_directories(config.output_dir);
  save_classifier(clf, model_path);
  nlohmann::json history = {{"train_size", clf.training_meta().value("train_size", std::size_t{0})},
                            {"provenance", provenance}};
  if (!trained.history.is_null()) history["epochs"] = trained.history;
  write_json(config.output_dir / "history.json", history);
  write_json(config.output_dir / "config.json", resolved);
  out << "trained " << to_string(clf.kind()) << " on " << history["train_size"].get<std::size_t>()
      << " documents; model " << model_path.string() << " sha256 " << clf.hash() << '\n';
  return 0;
}

int cmd_evaluate(const Invocation& inv, const std::string& model_path, std::ostream& out) {
  RunConfig config = inv.resolve();
  const auto& spec = config.experiment;
  const auto registry = load_registry(config.corpora);
  fs::create_directories(config.output_dir);
  write_json(config.output_dir / "config.json", config.to_json());
  if (!model_path.empty()) {
    const Classifier clf = load_classifier(model_path);
    const Corpus test = resolve_selector(spec.test, spec, registry, SplitRole::Test);
    const auto metrics = evaluate([&](const Document& d) { return clf.predict_proba(d); }, test);
    nlohmann::json hashes = nlohmann::json::object();
    for (const auto& name : spec.test.corpora) hashes[name] = content_hash(registry.at(name));
    const nlohmann::json j = {{"model", model_path},
                              {"model_hash", clf.hash()},
                              {"test", spec.test.label()},
                              {"metrics", to_json(metrics)},
                              {"provenance",
                               {{"version", kVersion},
                                {"config_hash", config_hash(config)},
                                {"corpus_hashes", hashes},
                                {"split_seed", spec.seed_base}}}};
    write_json(config.output_dir / "metrics.json", j);
    out << "accuracy " << format_ratio(metrics.accuracy) << "  f1 " << format_ratio(metrics.f1) << "  Fake: "
        << format_ratio(metrics.fake_accuracy) << " | Real: " << format_ratio(metrics.real_accuracy) << "  (n=" << metrics.n
        << ")\n";
    return 0;
  }
  std::optional<SynonymLexicon> lexicon;
  if (spec.augment) lexicon = open_lexicon(config);
  const auto result = run_experiment(spec, registry, lexicon ? &*lexicon : nullptr);
  write_json(config.output_dir / "results.json", result.to_json());
  out << format_matrix({result});
  return result.error ? 2 : 0;
}

int cmd_matrix(const Invocation& inv, bool reproduction, std::ostream& out) {
  RunConfig config = inv.resolve();
  if (reproduction) {
    config.matrix = reproduction_matrix(inv.seed.value_or(1), inv.repetitions.value_or(5));
  }
  const auto registry = load_registry(config.corpora);
  std::optional<SynonymLexicon> lexicon;
  for (const auto& s : config.matrix) {
    if (s.augment && !lexicon) lexicon = open_lexicon(config);
  }
  const auto results = run_matrix(config.matrix, registry, lexicon ? &*lexicon : nullptr, config.jobs);
  fs::create_directories(config.output_dir);
  write_json(config.output_dir / "config.json", config.to_json());
  auto j = matrix_to_json(results);
  j["config_hash"] = config_hash(config);
  write_json(config.output_dir / "matrix.json", j);
  const auto table = format_matrix(results);
  write_text(config.output_dir / "matrix.txt", table);
  out << table;
  for (const auto& r : results) {
    if (r.error) return 2;
  }
  return 0;
}

int cmd_augment(const Invocation& inv, const std::string& out_path, std::ostream& out) {
  RunConfig config = inv.resolve();
  const auto registry = load_registry(config.corpora);
  if (registry.size() != 1) throw InputError("augment: expected exactly one corpus");
  const auto& [name, corpus] = *registry.begin();
  const auto& spec = config.experiment;
  const auto lexicon = open_lexicon(config);
  const auto augmented = augment_corpus(corpus, lexicon, spec.augment_options, spec.seed_base);
  const fs::path path = out_path.empty() ? config.output_dir / (name + ".augmented.jsonl") : fs::path(out_path);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  save_jsonl(augmented, path);
  write_json(path.string() + ".provenance.json",
             {{"version", kVersion},
              {"config_hash", config_hash(config)},
              {"corpus_hashes", corpus_hashes(registry)},
              {"output_hash", content_hash(augmented)},
              {"seeds", {spec.seed_base}},
              {"copies_per_doc", spec.augment_options.copies_per_doc},
              {"replace_prob", spec.augment_options.replace_prob}});
  out << "wrote " << augmented.size() << " documents to " << path.string() << '\n';
  return 0;
}

struct ExplainFlags {
  std::string model;
  std::string method = "lime";
  std::string input = "-";
  std::string id;
  std::size_t top_k = 20;
  std::size_t samples = 1000;
  std::size_t features = 10;
  double kernel_width = 0.75;
};

int cmd_explain(const Invocation& inv, const ExplainFlags& flags, std::ostream& out, std::ostream& err) {
  RunConfig config = inv.resolve();
  if (flags.model.empty()) throw InputError("explain: --model is required");
  const auto method = parse_explain_method(flags.method);
  const Classifier clf = load_classifier(flags.model);
  if (method == ExplainMethod::Intrinsic && clf.kind() != ModelKind::Lstm) {
    throw InputError("method requires lstm model");
  }
  Document doc;
  if (flags.input == "-") {
    doc.text = read_all(std::cin);
    doc.id = flags.id.empty() ? "stdin" : flags.id;
  } else {
    std::ifstream in(flags.input, std::ios::binary);
    if (!in) throw InputError("cannot open " + flags.input);
    doc.text = read_all(in);
    doc.id = flags.id.empty() ? fs::path(flags.input).stem().string() : flags.id;
  }

  Explanation e;
  if (method == ExplainMethod::Intrinsic) {
    e = intrinsic_explain(*clf.lstm(), doc, flags.top_k);
  } else {
    LimeOptions options;
    options.num_samples = flags.samples;
    options.num_features = flags.features;
    options.kernel_width = flags.kernel_width;
    options.seed = config.experiment.seed_base;
    options.jobs = config.jobs;
    e = lime_explain([&](std::string_view text) { return clf.predict_proba_text(text); }, doc, options);
    e.top_k = std::min(flags.top_k, e.word_weights.size());
    bool any = false;
    for (const auto& w : e.word_weights) any = any || w.weight != 0.0;
    if (!any) e.warning = "the prediction does not depend on any token of the document";
  }
  e.model_hash = clf.hash();
  if (method == ExplainMethod::Lime) e.seed = config.experiment.seed_base;
  if (e.warning) err << "warning: " << *e.warning << '\n';

  fs::create_directories(config.output_dir);
  const fs::path html = config.output_dir / (doc.id + ".explanation.html");
  const fs::path json = config.output_dir / (doc.id + ".explanation.json");
  write_report(e, doc, html);
  auto j = e.to_json();
  j["provenance"] = {{"version", kVersion}, {"config_hash", config_hash(config)}, {"model_hash", e.model_hash}};
  write_json(json, j);
  out << html.string() << '\n';
  return 0;
}

}  // namespace

CorpusEntry CorpusEntry::parse(const std::string& text) {
  CorpusEntry entry;
  const auto eq = text.find('=');
  if (eq == std::string::npos) {
    entry.path = text;
    entry.name = entry.path.stem().string();
  } else {
    std::string head = text.substr(0, eq);
    entry.path = text.substr(eq + 1);
    if (const auto colon = head.find(':'); colon != std::string::npos) {
      entry.label = parse_label(head.substr(colon + 1));
      head.resize(colon);
    }
    entry.name = head;
  }
  if (entry.name.empty() || entry.path.empty()) throw InputError("bad corpus argument '" + text + "'");
  return entry;
}

nlohmann::json CorpusEntry::to_json() const {
  nlohmann::json j = {{"name", name}, {"path", path.string()}};
  j["label"] = label ? nlohmann::json(to_string(*label)) : nlohmann::json(nullptr);
  return j;
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json c = nlohmann::json::array();
  for (const auto& e : corpora) c.push_back(e.to_json());
  nlohmann::json m = nlohmann::json::array();
  for (const auto& s : matrix) m.push_back(s.to_json());
  return {{"corpora", c},
          {"output_dir", output_dir.string()},
          {"lexicon", lexicon.value_or(data_dir() / "synonyms.tsv").string()},
          {"jobs", jobs},
          {"experiment", experiment.to_json()},
          {"matrix", m}};
}

RunConfig RunConfig::from_json(const nlohmann::json& j) {
  RunConfig config;
  ObjectReader r(j, "config");
  if (const auto* v = r.find("corpora")) {
    if (!v->is_array()) throw InputError("config.corpora: expected a list");
    for (std::size_t i = 0; i < v->size(); ++i) {
      const auto& item = (*v)[i];
      const std::string where = "config.corpora[" + std::to_string(i) + "]";
      if (item.is_string()) {
        config.corpora.push_back(CorpusEntry::parse(item.get<std::string>()));
        continue;
      }
      ObjectReader e(item, where);
      CorpusEntry entry;
      std::string path;
      e.require("name", entry.name).require("path", path);
      entry.path = path;
      if (const auto* label = e.find("label"); label != nullptr && !label->is_null()) {
        entry.label = parse_label(label->get<std::string>());
      }
      e.finish();
      config.corpora.push_back(std::move(entry));
    }
  }
  std::string output_dir = config.output_dir.string();
  r.read("output_dir", output_dir).read("jobs", config.jobs);
  config.output_dir = output_dir;
  if (const auto* v = r.find("lexicon"); v != nullptr && !v->is_null()) config.lexicon = v->get<std::string>();
  if (const auto* v = r.find("experiment")) config.experiment = ExperimentSpec::from_json(*v, "config.experiment");
  if (const auto* v = r.find("matrix")) {
    if (v->is_string() && v->get<std::string>() == "reproduction") {
      config.matrix = reproduction_matrix();
    } else if (v->is_array()) {
      for (std::size_t i = 0; i < v->size(); ++i) {
        config.matrix.push_back(ExperimentSpec::from_json((*v)[i], "config.matrix[" + std::to_string(i) + "]"));
      }
    } else {
      throw InputError("config.matrix: expected a list of experiments or \"reproduction\"");
    }
  }
  r.finish();
  if (config.jobs == 0) throw InputError("config.jobs: must be at least 1");
  return config;
}

RunConfig RunConfig::load(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open config " + path.string());
  try {
    return from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

CorpusRegistry load_registry(const std::vector<CorpusEntry>& entries) {
  std::map<std::string, std::vector<const CorpusEntry*>> grouped;
  for (const auto& e : entries) grouped[e.name].push_back(&e);
  CorpusRegistry registry;
  for (const auto& [name, group] : grouped) {
    std::vector<Corpus> parts;
    for (const CorpusEntry* e : group) {
      LoadOptions options;
      options.name = group.size() > 1 ? name + "/" + e->path.stem().string() : name;
      options.allow_empty = true;
      options.default_source = source_for(name);
      options.default_label = e->label;
      parts.push_back(load_corpus(e->path, options));
    }
    if (parts.size() == 1) {
      registry.emplace(name, std::move(parts.front()));
      continue;
    }
    std::vector<Document> docs;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      for (auto doc : parts[i]) {
        doc.id = group[i]->path.stem().string() + "/" + doc.id;
        docs.push_back(std::move(doc));
      }
    }
    registry.emplace(name, Corpus(name, std::move(docs)));
  }
  for (const auto& [name, corpus] : registry) {
    const auto empty = std::count_if(corpus.begin(), corpus.end(), [](const Document& d) {
      return d.text.find_first_not_of(" \t\r\n") == std::string::npos;
    });
    if (empty > 0) std::clog << "warning: corpus " << name << " has " << empty << " empty documents\n";
  }
  return registry;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Disinformation corpus statistics, classifiers and explanations", "fakenews"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  app.fallthrough();
  Invocation inv;
  app.add_option("--jobs", inv.jobs, "Maximum worker threads")->check(CLI::PositiveNumber);

  bool as_json = false;
  std::size_t top_n = 50;
  auto* stats = app.add_subcommand("stats", "Summary statistics and top words per class");
  stats->add_option("corpora", inv.corpus_flags, "NAME[:LABEL]=PATH or PATH");
  stats->add_option("--config", inv.config_path, "JSON run configuration");
  stats->add_flag("--json", as_json, "Machine-readable output");
  stats->add_option("--top", top_n, "Top words listed per class (0 disables)");

  auto* train = app.add_subcommand("train", "Train one model and write it with its history");
  add_common(train, inv);
  add_experiment(train, inv);

  std::string model_path;
  auto* eval = app.add_subcommand("evaluate", "Evaluate a saved model, or run one repeated experiment");
  add_common(eval, inv);
  add_experiment(eval, inv);
  eval->add_option("--model", model_path, "Saved model to evaluate on --test");
  eval->add_option("--repetitions", inv.repetitions, "Runs per experiment");

  bool reproduction = false;
  auto* matrix = app.add_subcommand("matrix", "Run a list of experiments and print the results table");
  add_common(matrix, inv);
  matrix->add_option("--lexicon", inv.lexicon, "Synonym lexicon TSV");
  matrix->add_flag("--reproduction", reproduction, "Use the sixteen-row cross-corpus preset");
  matrix->add_option("--repetitions", inv.repetitions, "Runs per experiment");

  std::string augment_out;
  auto* augment = app.add_subcommand("augment", "Write a synonym-augmented copy of a corpus as JSONL");
  add_common(augment, inv);
  augment->add_option("corpora", inv.corpus_flags, "NAME[:LABEL]=PATH or PATH");
  augment->add_option("--out", augment_out, "Output JSONL file");
  augment->add_option("--copies", inv.copies, "Augmented copies per document");
  augment->add_option("--replace-prob", inv.replace_prob, "Per-token synonym replacement probability");
  augment->add_option("--lexicon", inv.lexicon, "Synonym lexicon TSV");

  ExplainFlags ef;
  auto* explain = app.add_subcommand("explain", "Explain one article as HTML and JSON");
  add_common(explain, inv);
  explain->add_option("--model", ef.model, "Saved model")->required();
  explain->add_option("--method", ef.method, "lime | intrinsic");
  explain->add_option("--input", ef.input, "Article text file, or - for stdin");
  explain->add_option("--id", ef.id, "Document id used in file names");
  explain->add_option("--top-k", ef.top_k, "Words shown in the bar list");
  explain->add_option("--samples", ef.samples, "LIME perturbation samples");
  explain->add_option("--features", ef.features, "LIME words reported");
  explain->add_option("--kernel-width", ef.kernel_width, "LIME proximity kernel width");

  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*stats) return cmd_stats(inv, as_json, top_n, out);
    if (*train) return cmd_train(inv, out);
    if (*eval) return cmd_evaluate(inv, model_path, out);
    if (*matrix) return cmd_matrix(inv, reproduction, out);
    if (*augment) return cmd_augment(inv, augment_out, out);
    if (*explain) return cmd_explain(inv, ef, out, err);
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}

}  // namespace fakenews
