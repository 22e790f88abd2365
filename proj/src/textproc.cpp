#include "concede/textproc.hpp"

#include <fstream>
#include <stdexcept>

#include "builtin_lists.hpp"
#include "concede/types.hpp"

namespace concede {

namespace {

bool is_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_word_byte(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80;
}

bool is_digit(unsigned char c) { return c >= '0' && c <= '9'; }

char lower(unsigned char c) {
  return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : static_cast<char>(c);
}

// Joiners stay inside a word only when flanked by word characters.
bool joins_word(std::string_view text, std::size_t i) {
  if (i == 0 || i + 1 >= text.size()) return false;
  auto prev = static_cast<unsigned char>(text[i - 1]);
  auto next = static_cast<unsigned char>(text[i + 1]);
  switch (text[i]) {
    case '\'':
    case '-':
      return is_word_byte(prev) && is_word_byte(next);
    case '.':
    case ',':
      return is_digit(prev) && is_digit(next);
    default:
      return false;
  }
}

}  // namespace

std::string TokenSequence::joined() const {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i];
  }
  return out;
}

TokenSequence tokenize(std::string_view text) {
  TokenSequence seq;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    auto c = static_cast<unsigned char>(text[i]);
    if (is_space(c)) {
      ++i;
      continue;
    }
    std::size_t start = i;
    if (is_word_byte(c)) {
      while (i < n && (is_word_byte(static_cast<unsigned char>(text[i])) || joins_word(text, i)))
        ++i;
    } else {
      while (i < n && text[i] == text[start]) ++i;
    }
    std::string tok;
    tok.reserve(i - start);
    for (std::size_t k = start; k < i; ++k) tok += lower(static_cast<unsigned char>(text[k]));
    seq.tokens.push_back(std::move(tok));
    seq.spans.emplace_back(start, i);
  }
  return seq;
}

bool is_punctuation(std::string_view token) {
  if (token.empty()) return false;
  for (unsigned char c : token)
    if (is_word_byte(c) || is_space(c)) return false;
  return true;
}

std::vector<std::string> ngrams(std::span<const std::string> tokens, int n) {
  if (n < 1) throw std::invalid_argument("ngrams: n must be >= 1");
  std::vector<std::string> out;
  const auto len = tokens.size();
  const auto width = static_cast<std::size_t>(n);
  if (len < width) return out;
  out.reserve(len - width + 1);
  for (std::size_t i = 0; i + width <= len; ++i) {
    std::string g = tokens[i];
    for (std::size_t k = 1; k < width; ++k) {
      g += ' ';
      g += tokens[i + k];
    }
    out.push_back(std::move(g));
  }
  return out;
}

const StopwordSet& default_stopwords() {
  static const StopwordSet words = [] {
    StopwordSet s;
    for (auto w : builtin::stopwords()) s.emplace(w);
    return s;
  }();
  return words;
}

StopwordSet load_stopwords(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open stopword file " + path.string());
  StopwordSet out;
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto toks = tokenize(line);
    if (toks.empty()) continue;
    // Contractions tokenize whole, so a word line is always a single token.
    out.insert(toks.tokens.front());
  }
  return out;
}

double jaccard(std::span<const std::string> a, std::span<const std::string> b,
               const StopwordSet& stopwords) {
  std::unordered_set<std::string_view> sa, sb;
  for (const auto& t : a)
    if (!stopwords.contains(t)) sa.insert(t);
  for (const auto& t : b)
    if (!stopwords.contains(t)) sb.insert(t);
  std::size_t inter = 0;
  for (auto t : sa)
    if (sb.contains(t)) ++inter;
  const std::size_t uni = sa.size() + sb.size() - inter;
  if (uni == 0) return 0.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace concede
