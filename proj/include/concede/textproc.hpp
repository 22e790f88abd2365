#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

namespace concede {

/// Lowercased tokens with their [start, end) byte offsets in the source text.
struct TokenSequence {
  std::vector<std::string> tokens;
  std::vector<std::pair<std::size_t, std::size_t>> spans;

  std::size_t size() const { return tokens.size(); }
  bool empty() const { return tokens.empty(); }
  /// Tokens joined by single spaces.
  std::string joined() const;
};

/// Splits on whitespace; keeps contractions ("don't") and hyphenated words whole;
/// punctuation becomes separate tokens, with runs of one character kept together ("...").
/// Bytes >= 0x80 are treated as word characters, so UTF-8 text is never split mid-codepoint.
TokenSequence tokenize(std::string_view text);

/// True for tokens made only of ASCII punctuation.
bool is_punctuation(std::string_view token);

/// Contiguous n-grams joined by a single space; max(0, len - n + 1) of them.
std::vector<std::string> ngrams(std::span<const std::string> tokens, int n);

using StopwordSet = std::unordered_set<std::string>;

/// Shipped English function-word list (see data/stopwords.txt).
const StopwordSet& default_stopwords();

/// One lowercase token per line, '#' starts a comment.
StopwordSet load_stopwords(const std::filesystem::path& path);

/// Set Jaccard over the token types of a and b after stopword removal.
/// Zero when the union is empty.
double jaccard(std::span<const std::string> a, std::span<const std::string> b,
               const StopwordSet& stopwords);

}  // namespace concede
