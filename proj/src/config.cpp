#include "concede/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "concede/digest.hpp"
#include "concede/parallel.hpp"
#include "concede/serialize.hpp"

namespace concede {

using nlohmann::json;

namespace {

std::string join_problems(const std::vector<std::string>& p) {
  std::string s = "invalid config:";
  for (const auto& x : p) s += "\n  " + x;
  return s;
}

class Reader {
 public:
  Reader(const json& doc, std::filesystem::path base) : doc_(doc), base_(std::move(base)) {}

  const json* section(const char* name) {
    auto it = doc_.find(name);
    if (it == doc_.end()) return nullptr;
    if (!it->is_object()) {
      fail(name, "must be an object");
      return nullptr;
    }
    return &*it;
  }

  template <class T>
  void get(const json* obj, const std::string& prefix, const char* key, T& out) {
    if (!obj) return;
    auto it = obj->find(key);
    if (it == obj->end() || it->is_null()) return;
    try {
      out = it->get<T>();
    } catch (const json::exception&) {
      fail(prefix + key, "has the wrong type");
    }
  }

  void path(const json* obj, const std::string& prefix, const char* key,
            std::optional<std::filesystem::path>& out) {
    std::string s;
    get(obj, prefix, key, s);
    if (!s.empty()) out = resolve(s);
  }

  std::filesystem::path resolve(const std::string& s) const {
    std::filesystem::path p(s);
    return p.is_absolute() ? p : base_ / p;
  }

  void split_paths(const json* obj, const std::string& prefix,
                   std::map<Split, std::filesystem::path>& out) {
    if (!obj) return;
    for (const auto& [k, v] : obj->items()) {
      auto split = parse_split(k);
      if (!split) {
        fail(prefix + k, "unknown split (expected train, dev, test or unlabeled)");
        continue;
      }
      if (!v.is_string() || v.get<std::string>().empty()) {
        fail(prefix + k, "must be a non-empty path string");
        continue;
      }
      out[*split] = resolve(v.get<std::string>());
    }
  }

  void fail(const std::string& field, const std::string& msg) { problems_.push_back(field + ": " + msg); }
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  const json& doc_;
  std::filesystem::path base_;
  std::vector<std::string> problems_;
};

json split_map(const std::map<Split, std::filesystem::path>& m) {
  json j = json::object();
  for (const auto& [s, p] : m) j[std::string(to_string(s))] = p.string();
  return j;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::runtime_error(join_problems(problems)), problems_(std::move(problems)) {}

RunConfig parse_config(const json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) throw ConfigError({"<root>: config must be a JSON object"});
  static const std::set<std::string> known = {"seed",     "jobs",     "output_dir", "corpus",
                                              "labels",   "votes",    "lexicons",   "patterns",
                                              "features", "svm",      "selftrain",  "predict",
                                              "distribution"};
  Reader r(doc, base_dir);
  for (const auto& [k, v] : doc.items())
    if (!known.contains(k)) r.fail(k, "unknown key");

  RunConfig c;
  r.get(&doc, "", "seed", c.seed);
  r.get(&doc, "", "jobs", c.jobs);
  if (c.jobs < 0) r.fail("jobs", "must be >= 0");
  std::optional<std::filesystem::path> out;
  r.path(&doc, "", "output_dir", out);
  if (out) c.output_dir = *out;
  else c.output_dir = base_dir / "out";

  if (const json* corpus = r.section("corpus")) {
    std::string format = "jsonl-v1";
    r.get(corpus, "corpus.", "format", format);
    if (auto f = parse_corpus_format(format)) c.corpus_format = *f;
    else r.fail("corpus.format", "unknown format '" + format + "' (expected jsonl-v1)");
    json splits = *corpus;
    splits.erase("format");
    r.split_paths(&splits, "corpus.", c.corpora);
  }
  r.split_paths(r.section("labels"), "labels.", c.labels);
  r.split_paths(r.section("votes"), "votes.", c.votes);

  if (const json* lex = r.section("lexicons")) {
    r.path(lex, "lexicons.", "sentiment", c.sentiment_lexicon);
    std::string fmt = "mpqa";
    r.get(lex, "lexicons.", "sentiment_format", fmt);
    if (fmt == "mpqa") c.sentiment_format = SentimentFormat::Mpqa;
    else if (fmt == "tsv") c.sentiment_format = SentimentFormat::Tsv;
    else r.fail("lexicons.sentiment_format", "must be 'mpqa' or 'tsv'");
    r.path(lex, "lexicons.", "hedges", c.hedges);
  }

  if (const json* pat = r.section("patterns")) {
    r.path(pat, "patterns.", "curated", c.curated_patterns);
    r.get(pat, "patterns.", "seeds", c.seeds);
    r.get(pat, "patterns.", "max_iterations", c.bootstrap_max_iterations);
    if (c.bootstrap_max_iterations < 1) r.fail("patterns.max_iterations", "must be >= 1");
    for (const auto& s : c.seeds) {
      try {
        LexicalPattern::parse(s, Provenance::Seed);
      } catch (const std::invalid_argument& e) {
        r.fail("patterns.seeds", "'" + s + "': " + e.what());
      }
    }
  }

  if (const json* f = r.section("features")) {
    r.get(f, "features.", "vocab_k", c.features.vocab_k);
    r.get(f, "features.", "chi2_k", c.features.chi2_k);
    r.get(f, "features.", "include_jaccard", c.features.include_jaccard);
    r.get(f, "features.", "include_pattern_hit", c.features.include_pattern_hit);
    if (c.features.vocab_k < 1) r.fail("features.vocab_k", "must be >= 1");
    if (c.features.chi2_k < 1) r.fail("features.chi2_k", "must be >= 1");
  }

  if (const json* s = r.section("svm")) {
    r.get(s, "svm.", "c", c.svm.c);
    r.get(s, "svm.", "gamma", c.svm.gamma);
    r.get(s, "svm.", "tolerance", c.svm.tolerance);
    r.get(s, "svm.", "max_passes", c.svm.max_passes);
    r.get(s, "svm.", "cache_rows", c.svm.cache_rows);
    std::string mode = "inverse_frequency";
    r.get(s, "svm.", "class_weight_mode", mode);
    if (auto m = parse_class_weight_mode(mode)) c.svm.class_weight_mode = *m;
    else r.fail("svm.class_weight_mode", "must be 'inverse_frequency' or 'uniform'");
    if (!(c.svm.c > 0)) r.fail("svm.c", "must be positive");
    if (c.svm.gamma < 0) r.fail("svm.gamma", "must be positive (or 0 for 1/number of features)");
    if (!(c.svm.tolerance > 0)) r.fail("svm.tolerance", "must be positive");
    if (c.svm.max_passes < 1) r.fail("svm.max_passes", "must be >= 1");
  }

  if (const json* st = r.section("selftrain")) {
    r.get(st, "selftrain.", "pool_size", c.selftrain.pool_size);
    r.get(st, "selftrain.", "g_c", c.selftrain.g_c);
    if (auto it = st->find("grid"); it != st->end()) {
      if (!it->is_array()) {
        r.fail("selftrain.grid", "must be a list of [pool_size, g_c] pairs");
      } else {
        for (const auto& cell : *it) {
          if (!cell.is_array() || cell.size() != 2 || !cell[0].is_number_integer() ||
              !cell[1].is_number_integer()) {
            r.fail("selftrain.grid", "each cell must be [pool_size, g_c]");
            continue;
          }
          const int p = cell[0].get<int>(), g = cell[1].get<int>();
          if (p < 1 || g < 1) r.fail("selftrain.grid", "pool_size and g_c must be >= 1");
          c.selftrain.grid.emplace_back(p, g);
        }
      }
    }
    if (c.selftrain.pool_size < 1) r.fail("selftrain.pool_size", "must be >= 1");
    if (c.selftrain.g_c < 1) r.fail("selftrain.g_c", "must be >= 1");
  }
  if (c.selftrain.grid.empty()) c.selftrain.grid.emplace_back(c.selftrain.pool_size, c.selftrain.g_c);

  if (const json* p = r.section("predict")) {
    r.get(p, "predict.", "model", c.predict_model);
    if (c.predict_model != "selftrain" && c.predict_model != "baseline")
      r.fail("predict.model", "must be 'selftrain' or 'baseline'");
    r.path(p, "predict.", "corpus", c.predict_corpus);
    r.get(p, "predict.", "include_jaccard", c.predict_include_jaccard);
  }
  if (const json* d = r.section("distribution"))
    r.get(d, "distribution.", "per_row_tests", c.distribution_per_row_tests);

  if (!r.problems().empty()) throw ConfigError(r.problems());
  c.svm.seed = c.seed;
  c.selftrain.seed = c.seed;
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  json doc;
  try {
    doc = read_json_file(path);
  } catch (const DataError& e) {
    throw ConfigError({std::string("<file>: ") + e.what()});
  }
  // Absolute so the hash does not depend on how the config path was spelled.
  const auto base = std::filesystem::absolute(path.parent_path().empty() ? "." : path.parent_path());
  return parse_config(doc, base.lexically_normal());
}

void check_paths(const RunConfig& config) {
  std::vector<std::string> problems;
  auto check = [&](const std::string& field, const std::filesystem::path& p) {
    if (!std::filesystem::exists(p)) problems.push_back(field + ": file not found: " + p.string());
  };
  for (const auto& [s, p] : config.corpora) check("corpus." + std::string(to_string(s)), p);
  for (const auto& [s, p] : config.labels) check("labels." + std::string(to_string(s)), p);
  for (const auto& [s, p] : config.votes) check("votes." + std::string(to_string(s)), p);
  if (config.sentiment_lexicon) check("lexicons.sentiment", *config.sentiment_lexicon);
  if (config.hedges) check("lexicons.hedges", *config.hedges);
  if (config.curated_patterns) check("patterns.curated", *config.curated_patterns);
  if (config.predict_corpus) check("predict.corpus", *config.predict_corpus);
  if (!problems.empty()) throw ConfigError(problems);
}

json RunConfig::canonical() const {
  json j;
  j["seed"] = seed;
  j["corpus"] = split_map(corpora);
  j["corpus"]["format"] = "jsonl-v1";
  j["labels"] = split_map(labels);
  j["votes"] = split_map(votes);
  j["lexicons"] = {{"sentiment", sentiment_lexicon ? sentiment_lexicon->string() : ""},
                   {"sentiment_format", sentiment_format == SentimentFormat::Mpqa ? "mpqa" : "tsv"},
                   {"hedges", hedges ? hedges->string() : ""}};
  j["patterns"] = {{"curated", curated_patterns ? curated_patterns->string() : ""},
                   {"seeds", seeds},
                   {"max_iterations", bootstrap_max_iterations}};
  j["features"] = {{"vocab_k", features.vocab_k},
                   {"chi2_k", features.chi2_k},
                   {"include_jaccard", features.include_jaccard},
                   {"include_pattern_hit", features.include_pattern_hit}};
  j["svm"] = to_json(svm);
  json grid = json::array();
  for (const auto& [p, g] : selftrain.grid) grid.push_back({p, g});
  j["selftrain"] = {{"pool_size", selftrain.pool_size}, {"g_c", selftrain.g_c}, {"grid", grid}};
  j["predict"] = {{"model", predict_model},
                  {"corpus", predict_corpus ? predict_corpus->string() : ""},
                  {"include_jaccard", predict_include_jaccard}};
  j["distribution"] = {{"per_row_tests", distribution_per_row_tests}};
  return j;
}

std::string RunConfig::hash() const { return digest_hex(canonical().dump()); }

int RunConfig::effective_jobs() const { return jobs > 0 ? jobs : default_jobs(); }

LexiconSet load_lexicons(const RunConfig& config) {
  LexiconSet lex;
  if (config.sentiment_lexicon) lex.sentiment = load_sentiment(*config.sentiment_lexicon, config.sentiment_format);
  if (config.hedges) {
    const auto text = read_file(*config.hedges);
    Lexicon h{"hedges", "hedges-" + digest_hex(text)};
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      h.add(line, LexTag::Hedge);
    }
    lex.hedges = std::move(h);
  }
  return lex;
}

}  // namespace concede
