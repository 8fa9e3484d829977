#pragma once

#include <cstddef>
#include <numeric>
#include <optional>
#include <vector>

// Metric definitions recomputed element by element from raw label vectors
// (true = fake), sharing no code with the library. Precision, recall and
// their harmonic mean are carried as exact fractions and rounded once, so
// results can be compared with ==.

namespace oracle {

struct Fraction {
  long long num = 0;
  long long den = 1;

  Fraction(long long n, long long d) : num(n), den(d) {
    const long long g = std::gcd(num, den);
    if (g > 1) {
      num /= g;
      den /= g;
    }
  }
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

inline Fraction operator*(Fraction a, Fraction b) { return {a.num * b.num, a.den * b.den}; }
inline Fraction operator+(Fraction a, Fraction b) { return {a.num * b.den + b.num * a.den, a.den * b.den}; }
inline Fraction operator/(Fraction a, Fraction b) { return {a.num * b.den, a.den * b.num}; }

struct BruteMetrics {
  double accuracy = 0.0;
  std::optional<double> fake_recall;
  std::optional<double> real_recall;
  std::optional<double> fake_f1;
  std::optional<double> real_f1;
  double macro_f1 = 0.0;
};

inline std::optional<double> f1_for(const std::vector<bool>& truth, const std::vector<bool>& pred, bool positive) {
  long long precision_den = 0, recall_den = 0, hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (pred[i] == positive) precision_den += 1;
    if (truth[i] == positive) recall_den += 1;
    if (pred[i] == positive && truth[i] == positive) hits += 1;
  }
  if (precision_den == 0 && recall_den == 0) return std::nullopt;
  if (hits == 0) return 0.0;
  const Fraction p(hits, precision_den);
  const Fraction r(hits, recall_den);
  return (Fraction(2, 1) * p * r / (p + r)).value();
}

inline std::optional<double> recall_for(const std::vector<bool>& truth, const std::vector<bool>& pred, bool positive) {
  long long den = 0, hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] != positive) continue;
    den += 1;
    if (pred[i] == positive) hits += 1;
  }
  if (den == 0) return std::nullopt;
  return Fraction(hits, den).value();
}

inline BruteMetrics brute_metrics(const std::vector<bool>& truth, const std::vector<bool>& pred) {
  BruteMetrics m;
  long long correct = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) correct += truth[i] == pred[i] ? 1 : 0;
  m.accuracy = Fraction(correct, static_cast<long long>(truth.size())).value();
  m.fake_recall = recall_for(truth, pred, true);
  m.real_recall = recall_for(truth, pred, false);
  m.fake_f1 = f1_for(truth, pred, true);
  m.real_f1 = f1_for(truth, pred, false);
  double sum = 0;
  int n = 0;
  for (const auto& f : {m.fake_f1, m.real_f1}) {
    if (f) {
      sum += *f;
      ++n;
    }
  }
  m.macro_f1 = sum / n;
  return m;
}

}  // namespace oracle
