#include "fakenews/common.hpp"

#include <algorithm>
#include <cctype>
#include <string>

namespace fakenews {
namespace {

std::string lower_ascii(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (const char c : text) {
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

std::string_view trim(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) {
    text.remove_prefix(1);
  }
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) {
    text.remove_suffix(1);
  }
  return text;
}

}  // namespace

std::string_view to_string(Label label) { return label == Label::Fake ? "fake" : "real"; }

std::string_view to_string(Source source) {
  switch (source) {
    case Source::SA1:
      return "SA1";
    case Source::US1:
      return "US1";
    case Source::US2:
      return "US2";
    case Source::Other:
      break;
  }
  return "Other";
}

Label parse_label(std::string_view text) {
  const std::string key = lower_ascii(trim(text));
  if (key == "fake" || key == "1") {
    return Label::Fake;
  }
  if (key == "real" || key == "true" || key == "0") {
    return Label::Real;
  }
  throw InputError("unknown label '" + std::string(text) + "'");
}

Source parse_source(std::string_view text) {
  const std::string key = lower_ascii(trim(text));
  if (key == "sa1") return Source::SA1;
  if (key == "us1") return Source::US1;
  if (key == "us2") return Source::US2;
  if (key.empty() || key == "other") return Source::Other;
  throw InputError("unknown source '" + std::string(text) + "'");
}

}  // namespace fakenews
