#include "concede/lexicons.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "builtin_lists.hpp"
#include "concede/digest.hpp"
#include "concede/textproc.hpp"
#include "concede/types.hpp"

namespace concede {

namespace {

std::vector<std::string> split_words(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ' ' || c == '\t') {
      if (!cur.empty()) out.push_back(std::move(cur)), cur.clear();
    } else {
      cur += (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

std::optional<LexTag> parse_polarity(std::string_view s, SentimentFormat format) {
  if (s == "positive") return LexTag::Positive;
  if (s == "negative") return LexTag::Negative;
  if (s == "neutral") return LexTag::Neutral;
  if (format == SentimentFormat::Mpqa) {
    // The MPQA clue file also uses these two values.
    if (s == "both") return LexTag::Neutral;
    if (s == "weakneg") return LexTag::Negative;
  }
  return std::nullopt;
}

}  // namespace

std::string_view to_string(LexTag tag) {
  switch (tag) {
    case LexTag::FirstPerson: return "first_person";
    case LexTag::SecondPerson: return "second_person";
    case LexTag::Modal: return "modal";
    case LexTag::Hedge: return "hedge";
    case LexTag::Negation: return "negation";
    case LexTag::Positive: return "positive";
    case LexTag::Negative: return "negative";
    case LexTag::Neutral: return "neutral";
    case LexTag::Attitude: return "attitude";
  }
  return "neutral";
}

bool is_be_form(std::string_view token) {
  static const std::vector<std::string_view> forms = {"be", "am", "is", "are", "was", "were",
                                                     "been", "being"};
  if (std::find(forms.begin(), forms.end(), token) != forms.end()) return true;
  return ends_with(token, "'re") || ends_with(token, "'m") || ends_with(token, "'s");
}

void Lexicon::add(std::string term, LexTag tag, std::string_view origin) {
  auto words = split_words(term);
  if (words.empty()) return;
  std::string key = words.front();
  for (std::size_t i = 1; i < words.size(); ++i) key += ' ' + words[i];

  if (auto it = entries_.find(key); it != entries_.end()) {
    if (it->second != tag) {
      std::string msg = "conflicting tags for '" + key + "': kept " +
                        std::string(to_string(it->second)) + ", ignored " +
                        std::string(to_string(tag));
      if (!origin.empty()) msg += " (" + std::string(origin) + ")";
      warnings_.push_back(std::move(msg));
    }
    return;
  }
  entries_.emplace(key, tag);
  if (words.size() == 2 && words[0] == "be") {
    be_constructions_.emplace_back(words[1], tag);
  } else if (words.size() > 1) {
    phrases_.emplace_back(std::move(words), tag);
  } else if (key.front() == '\'' || key.starts_with("n'")) {
    clitics_.push_back(key);
  }
}

std::optional<LexTag> Lexicon::lookup(std::string_view term) const {
  if (auto it = entries_.find(std::string(term)); it != entries_.end()) return it->second;
  return std::nullopt;
}

bool Lexicon::matches_token(std::string_view token, std::optional<LexTag> tag) const {
  if (auto hit = lookup(token); hit && (!tag || *hit == *tag)) return true;
  for (const auto& c : clitics_) {
    if (ends_with(token, c) && (!tag || entries_.at(c) == *tag)) return true;
  }
  return false;
}

bool Lexicon::occurs_in(std::span<const std::string> tokens, std::optional<LexTag> tag) const {
  for (const auto& t : tokens)
    if (matches_token(t, tag)) return true;
  for (const auto& [words, ptag] : phrases_) {
    if (tag && ptag != *tag) continue;
    if (words.size() > tokens.size()) continue;
    for (std::size_t i = 0; i + words.size() <= tokens.size(); ++i) {
      if (std::equal(words.begin(), words.end(), tokens.begin() + static_cast<std::ptrdiff_t>(i)))
        return true;
    }
  }
  for (const auto& [complement, btag] : be_constructions_) {
    if (tag && btag != *tag) continue;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (!is_be_form(tokens[i])) continue;
      for (std::size_t k = i + 1; k <= i + 2 && k < tokens.size(); ++k)
        if (tokens[k] == complement) return true;
    }
  }
  return false;
}

std::vector<std::string> builtin_lexicon_names() {
  return {"pronouns", "modals", "hedges", "negation", "attitude_indicators", "sentiment_verbs"};
}

Lexicon builtin_lexicon(std::string_view name) {
  Lexicon lex{std::string(name), std::string(name) + "-1"};
  auto add_all = [&](std::initializer_list<std::string_view> terms, LexTag tag) {
    for (auto t : terms) lex.add(std::string(t), tag);
  };
  if (name == "pronouns") {
    add_all({"i", "me", "my", "mine"}, LexTag::FirstPerson);
    add_all({"you", "your", "you're"}, LexTag::SecondPerson);
  } else if (name == "modals") {
    add_all({"can", "could", "may", "might", "must", "shall", "should", "will", "would",
             "ought", "can't", "couldn't", "mightn't", "mustn't", "shan't", "shouldn't", "won't",
             "wouldn't"},
            LexTag::Modal);
  } else if (name == "hedges") {
    lex = Lexicon{"hedges", std::string(builtin::kHedgesVersion)};
    for (auto h : builtin::hedges()) lex.add(std::string(h), LexTag::Hedge);
  } else if (name == "negation") {
    add_all({"not", "n't", "never", "no", "none", "nothing", "neither", "nor", "cannot"},
            LexTag::Negation);
  } else if (name == "attitude_indicators") {
    add_all({"think", "realize", "be right", "be correct"}, LexTag::Attitude);
  } else if (name == "sentiment_verbs") {
    add_all({"love", "like"}, LexTag::Positive);
  } else {
    std::string valid;
    for (const auto& n : builtin_lexicon_names()) valid += (valid.empty() ? "" : ", ") + n;
    throw std::invalid_argument("unknown lexicon '" + std::string(name) + "'; valid names: " +
                                valid);
  }
  return lex;
}

Lexicon load_sentiment(const std::filesystem::path& path, SentimentFormat format) {
  const std::string content = read_file(path);
  Lexicon lex{path.stem().string(), "sentiment-" + digest_hex(content)};
  std::istringstream in(content);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos || line.front() == '#') continue;

    std::string term, polarity;
    if (format == SentimentFormat::Tsv) {
      auto tab = line.find('\t');
      if (tab == std::string::npos) throw DataError("expected term<TAB>polarity", lineno);
      term = line.substr(0, tab);
      polarity = line.substr(tab + 1);
      while (!polarity.empty() && (polarity.back() == ' ' || polarity.back() == '\t'))
        polarity.pop_back();
    } else {
      std::istringstream fields(line);
      std::string kv;
      while (fields >> kv) {
        auto eq = kv.find('=');
        if (eq == std::string::npos) continue;
        auto key = kv.substr(0, eq);
        if (key == "word1") term = kv.substr(eq + 1);
        else if (key == "priorpolarity") polarity = kv.substr(eq + 1);
      }
      if (term.empty()) throw DataError("mpqa record without word1", lineno);
      if (polarity.empty()) throw DataError("mpqa record without priorpolarity", lineno);
    }
    auto tag = parse_polarity(polarity, format);
    if (!tag) throw DataError("unknown polarity '" + polarity + "'", lineno);
    lex.add(term, *tag, "line " + std::to_string(lineno));
  }
  return lex;
}

Lexicon merge_lexicons(const Lexicon& a, const Lexicon& b, std::string name) {
  Lexicon out{std::move(name), a.version() + "+" + b.version()};
  // Preserve insertion determinism: sort each side's terms before adding.
  for (const Lexicon* src : {&a, &b}) {
    std::vector<std::pair<std::string, LexTag>> items(src->entries().begin(),
                                                      src->entries().end());
    std::sort(items.begin(), items.end());
    for (auto& [term, tag] : items) out.add(term, tag, src->name());
  }
  return out;
}

}  // namespace concede
