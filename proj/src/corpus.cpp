#include "concede/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include <json.hpp>

namespace concede {

using nlohmann::json;

namespace {

bool is_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

std::string_view trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && is_space(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && is_space(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

const std::string& required_string(const json& j, const char* key, std::size_t line) {
  auto it = j.find(key);
  if (it == j.end()) throw DataError(std::string("missing field '") + key + "'", line);
  if (!it->is_string()) throw DataError(std::string("field '") + key + "' must be a string", line);
  return it->get_ref<const std::string&>();
}

bool required_bool(const json& j, const char* key, std::size_t line) {
  auto it = j.find(key);
  if (it == j.end()) throw DataError(std::string("missing field '") + key + "'", line);
  if (!it->is_boolean()) throw DataError(std::string("field '") + key + "' must be a boolean", line);
  return it->get<bool>();
}

bool is_abbreviation(std::string_view text, std::size_t dot) {
  static const std::vector<std::string_view> abbrevs = {"mr.",  "mrs.", "dr.", "e.g.",
                                                        "i.e.", "etc.", "vs.", "u.s."};
  std::size_t b = dot;
  while (b > 0 && !is_space(static_cast<unsigned char>(text[b - 1]))) --b;
  while (b < dot && (text[b] == '(' || text[b] == '"' || text[b] == '\'' || text[b] == '['))
    ++b;
  std::string word;
  for (std::size_t k = b; k <= dot; ++k) {
    char c = text[k];
    word += (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
  }
  return std::find(abbrevs.begin(), abbrevs.end(), word) != abbrevs.end();
}

bool is_terminator(char c) { return c == '.' || c == '!' || c == '?'; }
bool is_closer(char c) { return c == '"' || c == '\'' || c == ')' || c == ']'; }
bool is_opener(char c) { return c == '"' || c == '\'' || c == '(' || c == '['; }
bool starts_sentence(char c) { return (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9'); }

std::vector<std::vector<std::string>> census_token_forms() {
  std::vector<std::vector<std::string>> forms;
  for (const auto& m : census_markers()) forms.push_back(tokenize(m).tokens);
  return forms;
}

}  // namespace

bool MarkerInstance::marker_is_sentence_initial() const {
  auto toks = tokenize(sentence);
  for (int i = 0; i < marker_token_index && i < static_cast<int>(toks.size()); ++i)
    if (!is_punctuation(toks.tokens[static_cast<std::size_t>(i)])) return false;
  return true;
}

std::optional<CorpusFormat> parse_corpus_format(std::string_view id) {
  if (id == "jsonl-v1") return CorpusFormat::JsonlV1;
  return std::nullopt;
}

std::vector<Comment> ingest_jsonl(std::istream& in) {
  std::vector<Comment> out;
  std::map<std::string, std::size_t> seen;  // id -> index in out
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw DataError(std::string("malformed JSON: ") + e.what(), lineno);
    }
    if (!j.is_object()) throw DataError("record must be a JSON object", lineno);

    Comment c;
    c.id = required_string(j, "id", lineno);
    c.thread_id = required_string(j, "thread_id", lineno);
    c.author_id = required_string(j, "author_id", lineno);
    c.text = required_string(j, "text", lineno);
    c.is_original_post = required_bool(j, "is_original_post", lineno);
    c.delta_awarded = required_bool(j, "delta_awarded", lineno);
    if (auto it = j.find("parent_id"); it != j.end() && !it->is_null()) {
      if (!it->is_string()) throw DataError("field 'parent_id' must be a string or null", lineno);
      c.parent_id = it->get<std::string>();
    }
    if (c.id.empty()) throw DataError("empty comment id", lineno);
    if (trim(c.text).empty()) throw DataError("comment text is empty", lineno);
    if (c.is_original_post && c.parent_id)
      throw DataError("original post '" + c.id + "' must not have a parent_id", lineno);

    if (auto it = seen.find(c.id); it != seen.end()) {
      if (out[it->second].text != c.text)
        throw DataError("duplicate comment id '" + c.id + "' with different text", lineno);
      continue;
    }
    seen.emplace(c.id, out.size());
    out.push_back(std::move(c));
  }
  std::stable_sort(out.begin(), out.end(), [](const Comment& a, const Comment& b) {
    return std::tie(a.thread_id, a.id) < std::tie(b.thread_id, b.id);
  });
  return out;
}

std::vector<Comment> ingest(const std::filesystem::path& path, CorpusFormat format) {
  (void)format;  // jsonl-v1 is the only corpus format
  std::ifstream in(path);
  if (!in) throw DataError("cannot open corpus " + path.string());
  return ingest_jsonl(in);
}

std::vector<std::string> segment_sentences(std::string_view text) {
  std::vector<std::string> out;
  auto emit = [&](std::size_t b, std::size_t e) {
    auto s = trim(text.substr(b, e - b));
    if (!s.empty()) out.emplace_back(s);
  };
  const std::size_t n = text.size();
  std::size_t start = 0;
  std::size_t i = 0;
  while (i < n) {
    if (!is_terminator(text[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < n && is_terminator(text[j])) ++j;
    std::size_t k = j;
    while (k < n && is_closer(text[k])) ++k;
    if (k < n && is_space(static_cast<unsigned char>(text[k]))) {
      std::size_t m = k;
      while (m < n && is_space(static_cast<unsigned char>(text[m]))) ++m;
      bool next_starts = m < n && (starts_sentence(text[m]) ||
                                   (is_opener(text[m]) && m + 1 < n && starts_sentence(text[m + 1])));
      bool guarded = text[i] == '.' && j == i + 1 && is_abbreviation(text, i);
      if (next_starts && !guarded) {
        emit(start, k);
        start = m;
        i = m;
        continue;
      }
    }
    i = j;
  }
  if (start < n) emit(start, n);
  return out;
}

std::vector<MarkerInstance> extract_marker_instances(std::span<const Comment> comments,
                                                     std::span<const Marker> markers,
                                                     Split split) {
  std::vector<MarkerInstance> out;
  for (const auto& c : comments) {
    auto sentences = segment_sentences(c.text);
    for (std::size_t s = 0; s < sentences.size(); ++s) {
      auto toks = tokenize(sentences[s]);
      for (std::size_t t = 0; t < toks.size(); ++t) {
        auto m = parse_marker(toks.tokens[t]);
        if (!m || std::find(markers.begin(), markers.end(), *m) == markers.end()) continue;
        MarkerInstance inst;
        inst.id = c.id + ":" + std::to_string(s) + ":" + std::to_string(t);
        inst.comment_id = c.id;
        inst.thread_id = c.thread_id;
        inst.marker = *m;
        inst.sentence = sentences[s];
        if (s > 0) inst.prev_sentence = sentences[s - 1];
        if (s + 1 < sentences.size()) inst.next_sentence = sentences[s + 1];
        inst.marker_token_index = static_cast<int>(t);
        inst.delta_awarded = c.delta_awarded;
        inst.split = split;
        out.push_back(std::move(inst));
      }
    }
  }
  return out;
}

const std::vector<std::string>& census_markers() {
  static const std::vector<std::string> markers = {
      "admit",       "albeit",          "although",    "but",
      "concede",     "despite",         "even if",     "even though",
      "even when",   "however",         "in spite of", "nevertheless",
      "notwithstanding", "non the less", "nonetheless", "the fact remains that",
      "though",      "whereas",         "while"};
  return markers;
}

std::vector<MarkerCensusRow> marker_census(std::span<const Comment> comments) {
  const auto& names = census_markers();
  const auto forms = census_token_forms();
  std::vector<std::size_t> order(forms.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return forms[a].size() > forms[b].size();
  });

  std::vector<MarkerCensusRow> rows;
  for (const auto& n : names) rows.push_back({n, 0, 0});
  for (const auto& c : comments) {
    auto toks = tokenize(c.text).tokens;
    std::size_t i = 0;
    while (i < toks.size()) {
      bool matched = false;
      for (auto idx : order) {
        const auto& f = forms[idx];
        if (i + f.size() > toks.size()) continue;
        if (!std::equal(f.begin(), f.end(), toks.begin() + static_cast<std::ptrdiff_t>(i)))
          continue;
        (c.delta_awarded ? rows[idx].count_delta : rows[idx].count_no_delta) += 1;
        i += f.size();
        matched = true;
        break;
      }
      if (!matched) ++i;
    }
  }
  return rows;
}

std::unordered_map<std::string, std::vector<TokenSequence>> op_sentences_by_thread(
    std::span<const Comment> comments) {
  std::unordered_map<std::string, std::vector<TokenSequence>> out;
  for (const auto& c : comments) {
    if (!c.is_original_post) continue;
    auto& bucket = out[c.thread_id];
    for (const auto& s : segment_sentences(c.text)) bucket.push_back(tokenize(s));
  }
  return out;
}

}  // namespace concede
