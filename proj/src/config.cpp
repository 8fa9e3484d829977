#include "fakenews/config.hpp"

#include "fakenews/hash.hpp"

namespace fakenews {

ObjectReader::ObjectReader(const nlohmann::json& object, std::string where)
    : object_(object), where_(std::move(where)) {
  if (!object_.is_object()) throw InputError(where_ + ": expected an object");
}

const nlohmann::json* ObjectReader::find(std::string_view key) {
  const auto it = object_.find(key);
  if (it == object_.end()) return nullptr;
  seen_.emplace(key);
  return &*it;
}

void ObjectReader::finish() const {
  std::string unknown;
  for (const auto& [key, value] : object_.items()) {
    if (!seen_.contains(key)) unknown += (unknown.empty() ? "" : ", ") + key;
  }
  if (!unknown.empty()) throw InputError(where_ + ": unknown key(s): " + unknown);
}

std::string json_hash(const nlohmann::json& value) { return sha256_hex(value.dump()); }

}  // namespace fakenews
