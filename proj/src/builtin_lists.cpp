#include "builtin_lists.hpp"

// Keep in sync with data/stopwords.txt and data/hedges.txt (checked by the unit tests).

namespace concede::builtin {

const std::vector<std::string_view>& stopwords() {
  static const std::vector<std::string_view> words = {
    "a", "about", "above", "after", "again", "against", "all", "am", "an", "and", "any", "are",
    "as", "at", "be", "because", "been", "before", "being", "below", "between", "both", "but",
    "by", "can", "could", "did", "do", "does", "doing", "down", "during", "each", "few", "for",
    "from", "further", "had", "has", "have", "having", "he", "her", "here", "hers", "herself",
    "him", "himself", "his", "how", "i", "if", "in", "into", "is", "it", "its", "itself",
    "just", "me", "more", "most", "my", "myself", "no", "nor", "not", "of", "off", "on",
    "once", "only", "or", "other", "our", "ours", "ourselves", "out", "over", "own", "same",
    "she", "should", "so", "some", "such", "than", "that", "the", "their", "theirs", "them",
    "themselves", "then", "there", "these", "they", "this", "those", "through", "to", "too",
    "under", "until", "up", "very", "was", "we", "were", "what", "when", "where", "which",
    "while", "who", "whom", "why", "will", "with", "would", "you", "your", "yours", "yourself",
    "yourselves",
  };
  return words;
}

const std::vector<std::string_view>& hedges() {
  static const std::vector<std::string_view> words = {
    "about", "almost", "apparently", "appear", "appears", "approximately", "arguably",
    "around", "assume", "believe", "doubt", "essentially", "estimate", "fairly", "generally",
    "guess", "i believe", "i feel", "i guess", "i suppose", "i think", "in general",
    "in my opinion", "in my view", "indicate", "kind of", "largely", "likely", "mainly",
    "maybe", "more or less", "mostly", "normally", "often", "perhaps", "plausible",
    "plausibly", "possible", "possibly", "presumably", "probable", "probably", "quite",
    "rather", "relatively", "roughly", "seem", "seemingly", "seems", "somehow", "sometimes",
    "somewhat", "sort of", "suggest", "suggests", "suppose", "tend to", "tends to",
    "to some extent", "typically", "uncertain", "unclear", "unlikely", "usually", "virtually",
  };
  return words;
}

}  // namespace concede::builtin
