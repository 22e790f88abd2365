#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "concede/corpus.hpp"
#include "concede/detector.hpp"
#include "concede/lexicons.hpp"
#include "concede/selftrain.hpp"
#include "concede/svm.hpp"

namespace concede {

/// Config validation failure; one message per offending field.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

struct RunConfig {
  std::uint64_t seed = 13;
  int jobs = 0;  // 0 = available cores
  std::filesystem::path output_dir = "out";

  CorpusFormat corpus_format = CorpusFormat::JsonlV1;
  std::map<Split, std::filesystem::path> corpora;
  std::map<Split, std::filesystem::path> labels;  // instance_id <TAB> label
  std::map<Split, std::filesystem::path> votes;   // instance_id <TAB> arg_c <TAB> other [<TAB> expert]

  std::optional<std::filesystem::path> sentiment_lexicon;
  SentimentFormat sentiment_format = SentimentFormat::Mpqa;
  std::optional<std::filesystem::path> hedges;

  std::optional<std::filesystem::path> curated_patterns;
  std::vector<std::string> seeds = {"i agree", "you are right"};
  int bootstrap_max_iterations = 20;

  FeatureConfig features;
  SvmConfig svm;
  SelfTrainConfig selftrain;

  std::string predict_model = "selftrain";  // or "baseline"
  std::optional<std::filesystem::path> predict_corpus;
  bool predict_include_jaccard = true;

  bool distribution_per_row_tests = false;

  /// Canonical JSON form; the config hash is computed over it minus jobs and output_dir.
  nlohmann::json canonical() const;
  std::string hash() const;
  int effective_jobs() const;
};

/// Parses a config document. Relative paths are resolved against base_dir.
/// Throws ConfigError listing every invalid or missing field.
RunConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir);
RunConfig load_config(const std::filesystem::path& path);

/// Checks that every referenced input path exists.
void check_paths(const RunConfig& config);

/// Builds the lexicon set named by the config.
LexiconSet load_lexicons(const RunConfig& config);

}  // namespace concede
