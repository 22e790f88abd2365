#pragma once

#include <filesystem>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "concede/corpus.hpp"
#include "concede/features.hpp"
#include "concede/svm.hpp"

namespace concede {

/// Format tags written into every serialized object.
inline constexpr const char* kVocabularyFormat = "vocabulary-v1";
inline constexpr const char* kModelFormat = "svm-model-v1";
inline constexpr const char* kInstanceFormat = "instances-v1";

nlohmann::json to_json(const Comment& c);
nlohmann::json to_json(const MarkerInstance& m);
MarkerInstance instance_from_json(const nlohmann::json& j, std::size_t line = 0);

/// Vocabulary JSON carries the ordered names, kinds, idf table and version; loading
/// recomputes the version and rejects a file whose recorded version differs.
nlohmann::json to_json(const Vocabulary& v);
Vocabulary vocabulary_from_json(const nlohmann::json& j);

nlohmann::json to_json(const FeatureVector& v);
FeatureVector feature_vector_from_json(const nlohmann::json& j, const std::string& version);

nlohmann::json to_json(const SvmConfig& c);
SvmConfig svm_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SvmModel& m);
SvmModel model_from_json(const nlohmann::json& j);

void write_comments_jsonl(std::ostream& out, std::span<const Comment> comments);
void write_instances_jsonl(std::ostream& out, std::span<const MarkerInstance> instances);
std::vector<MarkerInstance> read_instances_jsonl(std::istream& in);
std::vector<MarkerInstance> read_instances_jsonl(const std::filesystem::path& path);

nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace concede
