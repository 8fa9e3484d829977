#pragma once

#include <set>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "fakenews/common.hpp"

namespace fakenews {

/// Reads fields from a JSON object and rejects keys nobody asked for.
class ObjectReader {
 public:
  /// `where` prefixes error messages, e.g. "config.model".
  ObjectReader(const nlohmann::json& object, std::string where);

  /// Leaves `out` untouched when the key is absent.
  template <typename T>
  ObjectReader& read(std::string_view key, T& out) {
    if (const auto* value = find(key)) {
      try {
        out = value->get<T>();
      } catch (const nlohmann::json::exception& e) {
        throw InputError(where_ + "." + std::string(key) + ": " + e.what());
      }
    }
    return *this;
  }

  template <typename T>
  ObjectReader& require(std::string_view key, T& out) {
    if (find(key) == nullptr) throw InputError(where_ + ": missing key '" + std::string(key) + "'");
    return read(key, out);
  }

  /// Marks the key as known and returns it, or nullptr when absent.
  const nlohmann::json* find(std::string_view key);
  std::string path(std::string_view key) const { return where_ + "." + std::string(key); }

  /// Throws InputError naming every key that was never read.
  void finish() const;

 private:
  const nlohmann::json& object_;
  std::string where_;
  std::set<std::string, std::less<>> seen_;
};

/// SHA-256 of the compact dump (object keys are sorted by nlohmann::json).
std::string json_hash(const nlohmann::json& value);

}  // namespace fakenews
