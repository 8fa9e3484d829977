#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace fakenews {

inline constexpr std::string_view kVersion = "0.3.0";

/// Base of every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad user input: malformed files, unknown labels, invalid configuration.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure during training (NaN loss, non-finite parameters).
class TrainingError : public Error {
 public:
  using Error::Error;
};

enum class Label : std::uint8_t { Fake, Real };

enum class Source : std::uint8_t { SA1, US1, US2, Other };

std::string_view to_string(Label label);
std::string_view to_string(Source source);

/// Case-insensitive: "fake"/"1" -> Fake, "real"/"true"/"0" -> Real.
Label parse_label(std::string_view text);
Source parse_source(std::string_view text);

/// 1 for Fake, 0 for Real.
inline double label_target(Label label) { return label == Label::Fake ? 1.0 : 0.0; }

inline double sigmoid(double z) {
  if (z >= 0) {
    return 1.0 / (1.0 + std::exp(-z));
  }
  const double e = std::exp(z);
  return e / (1.0 + e);
}

/// log(1 + exp(z)) without overflow.
inline double softplus(double z) {
  return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

}  // namespace fakenews
