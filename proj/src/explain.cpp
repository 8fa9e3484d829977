#include "fakenews/explain.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <thread>
#include <unordered_map>

#include <Eigen/Dense>

#include "fakenews/rng.hpp"
#include "fakenews/text.hpp"

namespace fakenews {
namespace {

void sort_weights(std::vector<WordWeight>& weights) {
  std::stable_sort(weights.begin(), weights.end(), [](const WordWeight& a, const WordWeight& b) {
    const double wa = std::abs(a.weight);
    const double wb = std::abs(b.weight);
    if (wa != wb) return wa > wb;
    return a.position < b.position;
  });
}

std::string join(const std::vector<std::string>& tokens, const std::vector<char>& keep) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (!keep[i]) continue;
    if (!out.empty()) out += ' ';
    out += tokens[i];
  }
  return out;
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string escape_html(std::string_view text) {
  std::string out;
  for (const char c : text) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

// Red pushes towards Fake, blue towards Real; intrinsic weights use amber.
std::string shade(ExplainMethod method, double weight, double opacity) {
  const char* rgb = method == ExplainMethod::Intrinsic ? "217,119,6" : (weight >= 0 ? "220,38,38" : "37,99,235");
  return std::string("rgba(") + rgb + "," + fixed(opacity, 3) + ")";
}

}  // namespace

std::string_view to_string(ExplainMethod method) { return method == ExplainMethod::Lime ? "lime" : "intrinsic"; }

ExplainMethod parse_explain_method(std::string_view text) {
  if (text == "lime") return ExplainMethod::Lime;
  if (text == "intrinsic") return ExplainMethod::Intrinsic;
  throw InputError("unknown explanation method '" + std::string(text) + "' (expected lime or intrinsic)");
}

std::vector<WordWeight> Explanation::top() const {
  const auto n = std::min(top_k, word_weights.size());
  return {word_weights.begin(), word_weights.begin() + static_cast<std::ptrdiff_t>(n)};
}

nlohmann::json Explanation::to_json() const {
  nlohmann::json weights = nlohmann::json::array();
  for (const auto& w : word_weights) {
    weights.push_back({{"token", w.token}, {"position", w.position}, {"weight", w.weight}});
  }
  nlohmann::json out = {{"schema", "fakenews-explanation"},
                        {"version", 1},
                        {"doc_id", doc_id},
                        {"predicted_label", to_string(predicted_label)},
                        {"probability", probability},
                        {"method", to_string(method)},
                        {"top_k", top_k},
                        {"model_hash", model_hash},
                        {"seed", seed},
                        {"word_weights", weights}};
  if (warning) out["warning"] = *warning;
  return out;
}

Explanation lime_explain(const TextPredictFn& predict, const Document& doc, const LimeOptions& options) {
  if (options.num_samples < 10) throw InputError("lime: num_samples must be at least 10");
  if (!(options.kernel_width > 0.0)) throw InputError("lime: kernel_width must be positive");
  const auto tokens = clean_tokens(doc.text);
  if (tokens.empty()) throw InputError("lime: document " + doc.id + " has no tokens");

  // One feature per unique word, in first-occurrence order.
  std::vector<std::string> features;
  std::vector<std::size_t> first_position;
  std::vector<std::size_t> feature_of(tokens.size());
  std::unordered_map<std::string_view, std::size_t> index;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const auto [it, inserted] = index.emplace(tokens[i], features.size());
    if (inserted) {
      features.push_back(tokens[i]);
      first_position.push_back(i);
    }
    feature_of[i] = it->second;
  }
  const std::size_t d = features.size();
  const std::size_t n = options.num_samples;

  Eigen::MatrixXd z = Eigen::MatrixXd::Ones(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  Rng rng(options.seed, "lime");
  std::vector<std::size_t> order(d);
  for (std::size_t s = 1; s < n; ++s) {
    const std::size_t removed = 1 + static_cast<std::size_t>(rng.below(d));
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(std::span(order));
    for (std::size_t k = 0; k < removed; ++k) z(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(order[k])) = 0;
  }

  std::vector<double> y(n);
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    std::vector<char> keep(tokens.size());
    for (std::size_t s = next++; s < n; s = next++) {
      for (std::size_t i = 0; i < tokens.size(); ++i) {
        keep[i] = z(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(feature_of[i])) != 0.0;
      }
      y[s] = predict(join(tokens, keep));
    }
  };
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 1; t < std::clamp<std::size_t>(options.jobs, 1, n); ++t) pool.emplace_back(worker);
    worker();
  }
  for (std::size_t s = 0; s < n; ++s) {
    if (!std::isfinite(y[s])) throw Error("lime: predictor returned a non-finite value for sample " + std::to_string(s));
  }

  Eigen::VectorXd w(static_cast<Eigen::Index>(n));
  for (Eigen::Index s = 0; s < w.size(); ++s) {
    const double active = z.row(s).sum();
    const double dist = active > 0 ? 1.0 - std::sqrt(active / static_cast<double>(d)) : 1.0;
    w(s) = std::exp(-(dist * dist) / (options.kernel_width * options.kernel_width));
  }
  const double w_sum = w.sum();
  // Weighted means, offset by the first value so a constant target centres
  // to exactly zero.
  double y_mean = 0.0;
  for (Eigen::Index s = 0; s < w.size(); ++s) y_mean += w(s) * (y[static_cast<std::size_t>(s)] - y[0]);
  y_mean = y[0] + y_mean / w_sum;
  const Eigen::RowVectorXd z_mean = (w.transpose() * z) / w_sum;
  Eigen::MatrixXd zc = z.rowwise() - z_mean;
  Eigen::VectorXd yc(w.size());
  for (Eigen::Index s = 0; s < w.size(); ++s) yc(s) = y[static_cast<std::size_t>(s)] - y_mean;

  const Eigen::MatrixXd zw = zc.array().colwise() * w.array();
  Eigen::MatrixXd gram = zw.transpose() * zc;
  gram.diagonal().array() += options.ridge;
  const Eigen::VectorXd coef = gram.ldlt().solve(zw.transpose() * yc);

  Explanation out;
  out.doc_id = doc.id;
  out.method = ExplainMethod::Lime;
  out.seed = options.seed;
  out.probability = predict(doc.text);
  if (!std::isfinite(out.probability)) throw Error("lime: predictor returned a non-finite value");
  out.predicted_label = out.probability >= 0.5 ? Label::Fake : Label::Real;
  std::vector<WordWeight> all;
  for (std::size_t f = 0; f < d; ++f) all.push_back({features[f], first_position[f], coef(static_cast<Eigen::Index>(f))});
  sort_weights(all);
  all.resize(std::min(all.size(), options.num_features));
  out.word_weights = std::move(all);
  out.top_k = out.word_weights.size();
  return out;
}

Explanation intrinsic_explain(const LstmArtifact& model, const Document& doc, std::size_t top_k) {
  const auto cleaned = clean_tokens(doc.text);
  // The tokenizer only drops words from the cleaned stream; remember where
  // each surviving token came from.
  std::vector<std::size_t> cleaned_index;
  const StopwordSet& stop = model.tokenizer.stopwords ? *model.tokenizer.stopwords : default_stopwords();
  std::vector<std::string> tokens;
  for (std::size_t i = 0; i < cleaned.size(); ++i) {
    if (model.tokenizer.remove_stopwords && stop.contains(cleaned[i])) continue;
    tokens.push_back(cleaned[i]);
    cleaned_index.push_back(i);
  }
  const auto seq = encode_sequence(tokens, model.vocabulary, model.network.config().seq_len);

  Explanation out;
  out.doc_id = doc.id;
  out.method = ExplainMethod::Intrinsic;
  out.top_k = top_k;
  out.probability = predict_proba(model.network, seq);
  out.predicted_label = out.probability >= 0.5 ? Label::Fake : Label::Real;
  for (const auto& c : extract_token_contributions(model.network, seq)) {
    const std::size_t pos = cleaned_index[seq.source_positions[c.position]];
    out.word_weights.push_back({cleaned[pos], pos, c.weight});
  }
  if (out.word_weights.empty()) out.warning = "no token of document " + doc.id + " is in the model vocabulary";
  sort_weights(out.word_weights);
  return out;
}

std::string render_report(const Explanation& e, const Document& doc) {
  const auto tokens = clean_tokens(doc.text);
  std::vector<double> weight(tokens.size(), 0.0);
  if (e.method == ExplainMethod::Lime) {
    std::unordered_map<std::string_view, double> by_token;
    for (const auto& w : e.word_weights) by_token[w.token] = w.weight;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (const auto it = by_token.find(tokens[i]); it != by_token.end()) weight[i] = it->second;
    }
  } else {
    for (const auto& w : e.word_weights) {
      if (w.position >= tokens.size()) throw InputError("report: explanation position outside the document");
      weight[w.position] = w.weight;
    }
  }
  double max_abs = 0.0;
  for (const double w : weight) max_abs = std::max(max_abs, std::abs(w));

  std::ostringstream html;
  html << "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n"
       << "<title>Explanation " << escape_html(e.doc_id) << "</title>\n<style>\n"
       << "body{font-family:Georgia,serif;max-width:60rem;margin:2rem auto;line-height:1.7;color:#111}\n"
       << "header{border-bottom:1px solid #ccc;margin-bottom:1rem}\n"
       << "dl{display:grid;grid-template-columns:max-content 1fr;gap:.2rem 1rem;font-family:monospace}\n"
       << "dt{font-weight:bold}\n.tok{padding:0 .1rem;border-radius:.2rem}\n"
       << ".bars{list-style:none;padding:0;font-family:monospace}\n"
       << ".bars li{display:grid;grid-template-columns:10rem 1fr 6rem;gap:.5rem;align-items:center}\n"
       << ".bar{height:.9rem}\n</style>\n</head>\n<body>\n<header>\n<h1>Document " << escape_html(e.doc_id)
       << "</h1>\n<dl>\n"
       << "<dt>Prediction</dt><dd>" << to_string(e.predicted_label) << "</dd>\n"
       << "<dt>Probability (fake)</dt><dd>" << fixed(e.probability, 4) << "</dd>\n"
       << "<dt>Method</dt><dd>" << to_string(e.method) << "</dd>\n"
       << "<dt>Model hash</dt><dd>" << escape_html(e.model_hash) << "</dd>\n"
       << "<dt>Seed</dt><dd>" << e.seed << "</dd>\n</dl>\n";
  if (e.warning) html << "<p class=\"warning\">" << escape_html(*e.warning) << "</p>\n";
  html << "</header>\n<section class=\"text\">\n<p>";
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) html << ' ';
    html << "<span class=\"tok\"";
    if (weight[i] != 0.0 && max_abs > 0.0) {
      html << " style=\"background:" << shade(e.method, weight[i], std::abs(weight[i]) / max_abs) << "\"";
    }
    html << ">" << escape_html(tokens[i]) << "</span>";
  }
  html << "</p>\n</section>\n<section>\n<h2>Top words</h2>\n<ul class=\"bars\">\n";
  const auto top = e.top();
  double top_max = 0.0;
  for (const auto& w : top) top_max = std::max(top_max, std::abs(w.weight));
  for (const auto& w : top) {
    const double frac = top_max > 0.0 ? std::abs(w.weight) / top_max : 0.0;
    html << "<li><span class=\"word\">" << escape_html(w.token) << "</span><span class=\"bar\" style=\"width:"
         << fixed(100.0 * frac, 1) << "%;background:" << shade(e.method, w.weight, 1.0) << "\"></span><span>"
         << fixed(w.weight, 6) << "</span></li>\n";
  }
  html << "</ul>\n</section>\n</body>\n</html>\n";
  return html.str();
}

void write_report(const Explanation& explanation, const Document& doc, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << render_report(explanation, doc);
  if (!out) throw Error("write failed: " + path.string());
}

}  // namespace fakenews
