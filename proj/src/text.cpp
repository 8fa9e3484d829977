#include "fakenews/text.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/locid.h>

#include <fstream>
#include <sstream>

#include "fakenews/common.hpp"

#ifndef FAKENEWS_DATA_DIR
#define FAKENEWS_DATA_DIR "data"
#endif

namespace fakenews {
namespace {

bool is_word_char(UChar32 c) {
  const auto mask = U_GET_GC_MASK(c);
  return (mask & (U_GC_L_MASK | U_GC_M_MASK)) != 0 || u_charType(c) == U_DECIMAL_DIGIT_NUMBER;
}

const icu::Normalizer2& nfc() {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* norm = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status) || norm == nullptr) {
    throw Error("ICU NFC normalizer unavailable");
  }
  return *norm;
}

icu::UnicodeString normalize(const icu::UnicodeString& text) {
  UErrorCode status = U_ZERO_ERROR;
  icu::UnicodeString out = nfc().normalize(text, status);
  if (U_FAILURE(status)) {
    throw Error("NFC normalization failed");
  }
  return out;
}

}  // namespace

std::string clean_text(std::string_view raw) {
  icu::UnicodeString text = icu::UnicodeString::fromUTF8(icu::StringPiece(raw.data(), static_cast<int32_t>(raw.size())));
  text = normalize(text);
  text.toLower(icu::Locale::getRoot());
  text = normalize(text);

  icu::UnicodeString kept;
  bool pending_space = false;
  for (int32_t i = 0; i < text.length();) {
    const UChar32 c = text.char32At(i);
    i += U16_LENGTH(c);
    if (is_word_char(c)) {
      if (pending_space && !kept.isEmpty()) {
        kept.append(static_cast<UChar>(' '));
      }
      pending_space = false;
      kept.append(c);
    } else {
      pending_space = true;
    }
  }
  std::string out;
  kept.toUTF8String(out);
  return out;
}

std::vector<std::string> tokenize(std::string_view cleaned) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; };
  while (i < cleaned.size()) {
    while (i < cleaned.size() && is_space(cleaned[i])) ++i;
    const std::size_t start = i;
    while (i < cleaned.size() && !is_space(cleaned[i])) ++i;
    if (i > start) {
      tokens.emplace_back(cleaned.substr(start, i - start));
    }
  }
  return tokens;
}

std::vector<std::string> clean_tokens(std::string_view raw) { return tokenize(clean_text(raw)); }

std::vector<std::string> remove_stopwords(std::span<const std::string> tokens, const StopwordSet& stopwords) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& token : tokens) {
    if (!stopwords.contains(token)) {
      out.push_back(token);
    }
  }
  return out;
}

StopwordSet load_stopwords(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw InputError("cannot open stopword list " + path.string());
  }
  StopwordSet words;
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    for (auto& word : tokenize(line)) {
      words.insert(std::move(word));
    }
  }
  return words;
}

std::filesystem::path data_dir() {
  if (const char* env = std::getenv("FAKENEWS_DATA_DIR"); env != nullptr && *env != '\0') {
    return env;
  }
  return FAKENEWS_DATA_DIR;
}

const StopwordSet& default_stopwords() {
  static const StopwordSet words = load_stopwords(data_dir() / "stopwords_en.txt");
  return words;
}

std::vector<std::string> TokenizerOptions::operator()(std::string_view raw) const {
  auto tokens = clean_tokens(raw);
  if (!remove_stopwords) {
    return tokens;
  }
  return fakenews::remove_stopwords(tokens, stopwords != nullptr ? *stopwords : default_stopwords());
}

}  // namespace fakenews
