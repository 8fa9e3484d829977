#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace fakenews {

using StopwordSet = std::unordered_set<std::string>;

/// NFC-normalizes, lowercases, replaces every code point that is not a
/// letter, combining mark or decimal digit with a space, collapses whitespace
/// runs and trims. Idempotent.
std::string clean_text(std::string_view raw);

/// Splits cleaned text on whitespace. Never yields empty tokens.
std::vector<std::string> tokenize(std::string_view cleaned);

/// clean_text followed by tokenize.
std::vector<std::string> clean_tokens(std::string_view raw);

std::vector<std::string> remove_stopwords(std::span<const std::string> tokens, const StopwordSet& stopwords);

/// One word per line, UTF-8; '#' starts a comment; blank lines ignored.
StopwordSet load_stopwords(const std::filesystem::path& path);

/// Directory holding the bundled data files. FAKENEWS_DATA_DIR in the
/// environment overrides the compiled-in location.
std::filesystem::path data_dir();

/// The bundled 318-word English list (data/stopwords_en.txt).
const StopwordSet& default_stopwords();

/// How documents are turned into model tokens.
struct TokenizerOptions {
  bool remove_stopwords = false;
  const StopwordSet* stopwords = nullptr;  // defaults to default_stopwords()

  std::vector<std::string> operator()(std::string_view raw) const;
};

}  // namespace fakenews
