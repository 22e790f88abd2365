#include "concede/serialize.hpp"

#include <fstream>

#include "concede/digest.hpp"

namespace concede {

using nlohmann::json;

namespace {

template <class T>
T field(const json& j, const char* key, std::size_t line = 0) {
  auto it = j.find(key);
  if (it == j.end()) throw DataError(std::string("missing field '") + key + "'", line);
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw DataError(std::string("field '") + key + "' has the wrong type", line);
  }
}

void expect_format(const json& j, const char* format) {
  auto it = j.find("format");
  if (it == j.end() || !it->is_string() || it->get<std::string>() != format)
    throw DataError(std::string("expected a '") + format + "' document");
}

}  // namespace

json to_json(const Comment& c) {
  json j = {{"id", c.id},
            {"thread_id", c.thread_id},
            {"author_id", c.author_id},
            {"text", c.text},
            {"is_original_post", c.is_original_post},
            {"delta_awarded", c.delta_awarded}};
  j["parent_id"] = c.parent_id ? json(*c.parent_id) : json(nullptr);
  return j;
}

json to_json(const MarkerInstance& m) {
  json j = {{"id", m.id},
            {"comment_id", m.comment_id},
            {"thread_id", m.thread_id},
            {"marker", to_string(m.marker)},
            {"sentence", m.sentence},
            {"marker_token_index", m.marker_token_index},
            {"delta_awarded", m.delta_awarded},
            {"split", to_string(m.split)}};
  j["prev_sentence"] = m.prev_sentence ? json(*m.prev_sentence) : json(nullptr);
  j["next_sentence"] = m.next_sentence ? json(*m.next_sentence) : json(nullptr);
  j["gold_label"] = m.gold_label ? json(to_string(*m.gold_label)) : json(nullptr);
  json crowd = json::array();
  for (auto l : m.crowd_labels) crowd.push_back(to_string(l));
  j["crowd_labels"] = std::move(crowd);
  return j;
}

MarkerInstance instance_from_json(const json& j, std::size_t line) {
  MarkerInstance m;
  m.id = field<std::string>(j, "id", line);
  m.comment_id = field<std::string>(j, "comment_id", line);
  m.thread_id = field<std::string>(j, "thread_id", line);
  auto marker = parse_marker(field<std::string>(j, "marker", line));
  if (!marker) throw DataError("unknown marker", line);
  m.marker = *marker;
  m.sentence = field<std::string>(j, "sentence", line);
  m.marker_token_index = field<int>(j, "marker_token_index", line);
  m.delta_awarded = field<bool>(j, "delta_awarded", line);
  auto split = parse_split(field<std::string>(j, "split", line));
  if (!split) throw DataError("unknown split", line);
  m.split = *split;
  auto opt_string = [&](const char* key) -> std::optional<std::string> {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) throw DataError(std::string("field '") + key + "' must be a string", line);
    return it->get<std::string>();
  };
  m.prev_sentence = opt_string("prev_sentence");
  m.next_sentence = opt_string("next_sentence");
  if (auto g = opt_string("gold_label")) {
    auto l = parse_label(*g);
    if (!l) throw DataError("unknown gold label '" + *g + "'", line);
    m.gold_label = *l;
  }
  if (auto it = j.find("crowd_labels"); it != j.end() && it->is_array()) {
    for (const auto& c : *it) {
      auto l = c.is_string() ? parse_label(c.get<std::string>()) : std::nullopt;
      if (!l) throw DataError("bad crowd label", line);
      m.crowd_labels.push_back(*l);
    }
  }
  return m;
}

json to_json(const Vocabulary& v) {
  json entries = json::array();
  for (const auto& e : v.entries()) entries.push_back({{"name", e.name}, {"kind", to_string(e.kind)}});
  json idf = json::object();
  for (const auto& [k, x] : v.idf()) idf[k] = x;
  return {{"format", kVocabularyFormat},
          {"version", v.version()},
          {"document_unit", "feature_span"},
          {"ngram_score", "max_tfidf"},
          {"entries", std::move(entries)},
          {"idf", std::move(idf)}};
}

Vocabulary vocabulary_from_json(const json& j) {
  expect_format(j, kVocabularyFormat);
  std::vector<VocabularyEntry> entries;
  for (const auto& e : field<json>(j, "entries")) {
    auto kind = parse_feature_kind(field<std::string>(e, "kind"));
    if (!kind) throw DataError("unknown feature kind in vocabulary");
    entries.push_back({field<std::string>(e, "name"), *kind});
  }
  std::map<std::string, double> idf;
  const auto idf_json = field<json>(j, "idf");
  for (const auto& [k, x] : idf_json.items()) {
    if (!x.is_number()) throw DataError("idf value for '" + k + "' is not a number");
    idf[k] = x.get<double>();
  }
  Vocabulary v(std::move(entries), std::move(idf));
  const auto recorded = field<std::string>(j, "version");
  if (recorded != v.version()) throw VersionMismatchError(recorded, v.version());
  return v;
}

json to_json(const FeatureVector& v) { return {{"i", v.indices}, {"v", v.values}}; }

FeatureVector feature_vector_from_json(const json& j, const std::string& version) {
  FeatureVector v;
  v.indices = field<std::vector<std::uint32_t>>(j, "i");
  v.values = field<std::vector<double>>(j, "v");
  if (v.indices.size() != v.values.size()) throw DataError("sparse vector index/value length mismatch");
  v.vocabulary_version = version;
  return v;
}

json to_json(const SvmConfig& c) {
  return {{"c", c.c},
          {"gamma", c.gamma},
          {"class_weight_mode", to_string(c.class_weight_mode)},
          {"tolerance", c.tolerance},
          {"max_passes", c.max_passes},
          {"seed", c.seed},
          {"cache_rows", c.cache_rows}};
}

SvmConfig svm_config_from_json(const json& j) {
  SvmConfig c;
  c.c = j.value("c", c.c);
  c.gamma = j.value("gamma", c.gamma);
  if (auto it = j.find("class_weight_mode"); it != j.end()) {
    auto m = it->is_string() ? parse_class_weight_mode(it->get<std::string>()) : std::nullopt;
    if (!m) throw DataError("class_weight_mode must be 'inverse_frequency' or 'uniform'");
    c.class_weight_mode = *m;
  }
  c.tolerance = j.value("tolerance", c.tolerance);
  c.max_passes = j.value("max_passes", c.max_passes);
  c.seed = j.value("seed", c.seed);
  c.cache_rows = j.value("cache_rows", c.cache_rows);
  return c;
}

json to_json(const SvmModel& m) {
  json svs = json::array();
  for (const auto& v : m.support_vectors) svs.push_back(to_json(v));
  return {{"format", kModelFormat},
          {"vocabulary_version", m.vocabulary_version},
          {"config", to_json(m.config)},
          {"bias", m.bias},
          {"c_pos", m.c_pos},
          {"c_neg", m.c_neg},
          {"full_sweeps", m.full_sweeps},
          {"steps", m.steps},
          {"dual_coeffs", m.dual_coeffs},
          {"support_vectors", std::move(svs)}};
}

SvmModel model_from_json(const json& j) {
  expect_format(j, kModelFormat);
  SvmModel m;
  m.vocabulary_version = field<std::string>(j, "vocabulary_version");
  m.config = svm_config_from_json(field<json>(j, "config"));
  m.bias = field<double>(j, "bias");
  m.c_pos = field<double>(j, "c_pos");
  m.c_neg = field<double>(j, "c_neg");
  m.full_sweeps = j.value("full_sweeps", 0);
  m.steps = j.value("steps", std::size_t{0});
  m.dual_coeffs = field<std::vector<double>>(j, "dual_coeffs");
  for (const auto& v : field<json>(j, "support_vectors"))
    m.support_vectors.push_back(feature_vector_from_json(v, m.vocabulary_version));
  if (m.support_vectors.size() != m.dual_coeffs.size())
    throw DataError("model has " + std::to_string(m.support_vectors.size()) +
                    " support vectors but " + std::to_string(m.dual_coeffs.size()) + " coefficients");
  return m;
}

void write_comments_jsonl(std::ostream& out, std::span<const Comment> comments) {
  for (const auto& c : comments) out << to_json(c).dump() << '\n';
}

void write_instances_jsonl(std::ostream& out, std::span<const MarkerInstance> instances) {
  for (const auto& m : instances) out << to_json(m).dump() << '\n';
}

std::vector<MarkerInstance> read_instances_jsonl(std::istream& in) {
  std::vector<MarkerInstance> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw DataError(std::string("malformed JSON: ") + e.what(), lineno);
    }
    out.push_back(instance_from_json(j, lineno));
  }
  return out;
}

std::vector<MarkerInstance> read_instances_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return read_instances_jsonl(in);
}

json read_json_file(const std::filesystem::path& path) {
  const auto text = read_file(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(path.string() + ": malformed JSON: " + e.what());
  }
}

}  // namespace concede
