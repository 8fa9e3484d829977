#include "fakenews/metrics.hpp"

#include <cmath>
#include <cstdio>

namespace fakenews {
namespace {

std::optional<double> ratio(std::size_t num, std::size_t den) {
  if (den == 0) return std::nullopt;
  return static_cast<double>(num) / static_cast<double>(den);
}

nlohmann::json optional_json(std::optional<double> v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }

}  // namespace

void Confusion::add(Label truth, Label predicted) {
  if (truth == Label::Fake) {
    ++(predicted == Label::Fake ? tp : fn);
  } else {
    ++(predicted == Label::Fake ? fp : tn);
  }
}

Metrics compute_metrics(const Confusion& c) {
  if (c.n() == 0) throw InputError("metrics: no predictions");
  Metrics m;
  m.confusion = c;
  m.n = c.n();
  m.accuracy = static_cast<double>(c.tp + c.tn) / static_cast<double>(m.n);
  m.fake_accuracy = ratio(c.tp, c.tp + c.fn);
  m.real_accuracy = ratio(c.tn, c.tn + c.fp);
  m.f1_fake = ratio(2 * c.tp, 2 * c.tp + c.fp + c.fn);
  m.f1_real = ratio(2 * c.tn, 2 * c.tn + c.fn + c.fp);
  double sum = 0.0;
  int defined = 0;
  for (const auto& f : {m.f1_fake, m.f1_real}) {
    if (f) {
      sum += *f;
      ++defined;
    }
  }
  m.f1 = sum / defined;
  return m;
}

Metrics compute_metrics(std::span<const Label> truth, std::span<const Label> predicted) {
  if (truth.size() != predicted.size()) throw InputError("metrics: label and prediction counts differ");
  Confusion c;
  for (std::size_t i = 0; i < truth.size(); ++i) c.add(truth[i], predicted[i]);
  return compute_metrics(c);
}

Metrics evaluate(const PredictFn& predict, const Corpus& test, double threshold) {
  if (test.empty()) throw InputError("evaluate: empty test corpus '" + test.name() + "'");
  Confusion c;
  for (const auto& doc : test) {
    const double p = predict(doc);
    if (!std::isfinite(p)) throw Error("evaluate: non-finite probability for document " + doc.id);
    c.add(doc.label, p >= threshold ? Label::Fake : Label::Real);
  }
  return compute_metrics(c);
}

MeanMetrics mean_metrics(std::span<const Metrics> runs) {
  MeanMetrics out;
  out.runs = runs.size();
  if (runs.empty()) return out;
  const auto mean_of = [&](auto field) -> std::optional<double> {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& r : runs) {
      if (const std::optional<double> v = field(r)) {
        sum += *v;
        ++n;
      }
    }
    if (n == 0) return std::nullopt;
    return sum / static_cast<double>(n);
  };
  out.accuracy = *mean_of([](const Metrics& m) { return std::optional<double>(m.accuracy); });
  out.f1 = *mean_of([](const Metrics& m) { return std::optional<double>(m.f1); });
  out.f1_fake = mean_of([](const Metrics& m) { return m.f1_fake; });
  out.fake_accuracy = mean_of([](const Metrics& m) { return m.fake_accuracy; });
  out.real_accuracy = mean_of([](const Metrics& m) { return m.real_accuracy; });
  return out;
}

std::string format_ratio(std::optional<double> value) {
  if (!value) return "n/a";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", *value);
  return buf;
}

nlohmann::json to_json(const Metrics& m) {
  return {{"n", m.n},
          {"accuracy", m.accuracy},
          {"f1", m.f1},
          {"f1_fake", optional_json(m.f1_fake)},
          {"f1_real", optional_json(m.f1_real)},
          {"per_class_accuracy", {{"fake", optional_json(m.fake_accuracy)}, {"real", optional_json(m.real_accuracy)}}},
          {"confusion", {{"tp", m.confusion.tp}, {"fp", m.confusion.fp}, {"tn", m.confusion.tn}, {"fn", m.confusion.fn}}}};
}

nlohmann::json to_json(const MeanMetrics& m) {
  return {{"runs", m.runs},
          {"accuracy", m.accuracy},
          {"f1", m.f1},
          {"f1_fake", optional_json(m.f1_fake)},
          {"per_class_accuracy", {{"fake", optional_json(m.fake_accuracy)}, {"real", optional_json(m.real_accuracy)}}}};
}

}  // namespace fakenews
