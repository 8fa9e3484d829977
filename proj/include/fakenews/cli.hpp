#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fakenews/experiment.hpp"

namespace fakenews {

/// One file or directory contributing documents to a named corpus. Entries
/// sharing a name are concatenated in order.
struct CorpusEntry {
  std::string name;
  std::filesystem::path path;
  /// Label for files that carry none (e.g. one file per class).
  std::optional<Label> label;

  /// "NAME[:LABEL]=PATH", or a bare PATH named after its stem.
  static CorpusEntry parse(const std::string& text);
  nlohmann::json to_json() const;
};

/// Declarative run configuration. Precedence: built-in defaults, then the
/// config file, then command-line flags.
struct RunConfig {
  std::vector<CorpusEntry> corpora;
  std::filesystem::path output_dir = "out";
  /// Synonym lexicon for augmentation; defaults to the bundled file.
  std::optional<std::filesystem::path> lexicon;
  std::size_t jobs = 1;
  ExperimentSpec experiment;
  std::vector<ExperimentSpec> matrix;

  /// Fully resolved, defaults included.
  nlohmann::json to_json() const;
  /// Strict: unknown keys are rejected. "matrix" may be a list of
  /// experiments or the string "reproduction".
  static RunConfig from_json(const nlohmann::json& j);
  static RunConfig load(const std::filesystem::path& path);
};

/// Loads every configured corpus, concatenating entries that share a name.
CorpusRegistry load_registry(const std::vector<CorpusEntry>& entries);

/// Entry point of the `fakenews` tool. Exit codes: 0 success, 1 user or
/// configuration error, 2 runtime failure.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fakenews
