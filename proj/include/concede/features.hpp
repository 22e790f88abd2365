#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "concede/corpus.hpp"
#include "concede/lexicons.hpp"
#include "concede/patterns.hpp"
#include "concede/textproc.hpp"
#include "concede/types.hpp"

namespace concede {

enum class FeatureKind { Unigram, Bigram, Pronoun, Modal, Hedge, Jaccard, Sentiment, PatternHit };
std::string_view to_string(FeatureKind kind);
std::optional<FeatureKind> parse_feature_kind(std::string_view s);

/// Names of the non n-gram columns. They contain ':' so they can never collide
/// with a word n-gram.
namespace column {
inline constexpr std::string_view kFirstPerson = "lex:first_person";
inline constexpr std::string_view kSecondPerson = "lex:second_person";
inline constexpr std::string_view kModal = "lex:modal";
inline constexpr std::string_view kHedge = "lex:hedge";
inline constexpr std::string_view kJaccard = "sim:jaccard";
inline constexpr std::string_view kSentimentPositive = "sent:positive";
inline constexpr std::string_view kSentimentNegative = "sent:negative";
inline constexpr std::string_view kSentimentNeutral = "sent:neutral";
inline constexpr std::string_view kPatternHit = "pat:hit";
}  // namespace column

struct VocabularyEntry {
  std::string name;
  FeatureKind kind;
};

class Vocabulary {
 public:
  Vocabulary() = default;
  /// Names must be unique. idf holds the scores' idf for the n-gram columns.
  Vocabulary(std::vector<VocabularyEntry> entries, std::map<std::string, double> idf);

  const std::vector<VocabularyEntry>& entries() const { return entries_; }
  const std::map<std::string, double>& idf() const { return idf_; }
  const std::string& version() const { return version_; }
  std::size_t size() const { return entries_.size(); }

  std::optional<std::uint32_t> index_of(std::string_view name) const;
  bool has(std::string_view name) const { return index_of(name).has_value(); }

  /// Dense re-indexing of the given columns, in column order.
  Vocabulary restrict(std::span<const std::uint32_t> columns) const;

 private:
  std::vector<VocabularyEntry> entries_;
  std::map<std::string, double> idf_;
  std::unordered_map<std::string, std::uint32_t> index_;
  std::string version_;
};

struct FeatureVector {
  std::vector<std::uint32_t> indices;
  std::vector<double> values;
  std::string vocabulary_version;

  std::size_t nnz() const { return indices.size(); }
  double get(std::uint32_t column) const;
};

struct VocabularyOptions {
  int k = 1000;
  bool include_jaccard = true;
  bool include_pattern_hit = false;
};

/// Tokens the features are computed over: the sentence, preceded by the previous
/// sentence when the instance has one.
TokenSequence feature_span(const MarkerInstance& instance);

/// Candidate n-grams are the word unigrams and bigrams of every feature span; a
/// candidate's score is its highest tf-idf over the spans (tf = raw count, idf =
/// ln(N/df)). The top k by score, ties by name, become the first columns.
Vocabulary build_vocabulary(std::span<const MarkerInstance> instances,
                            const VocabularyOptions& options = {});

/// Per-candidate scores, exposed for reports and tests. Keyed by n-gram text.
std::map<std::string, double> ngram_scores(std::span<const MarkerInstance> instances);

struct FeaturizeOptions {
  bool include_jaccard = true;
  /// Value of the pattern-hit column when the vocabulary has one.
  bool pattern_hit = false;
};

/// Throws std::invalid_argument when include_jaccard is set and op_sentences is empty.
FeatureVector featurize(const MarkerInstance& instance, std::span<const TokenSequence> op_sentences,
                        const Vocabulary& vocab, const LexiconSet& lexicons,
                        const FeaturizeOptions& options = {});

/// Pearson statistic of the 2x2 (column value > 0) x (label) table; 0 when a
/// margin is empty.
double chi2_2x2(long a, long b, long c, long d);

/// Per-column statistics, indexed by column.
std::vector<double> chi2_scores(std::span<const FeatureVector> vectors, std::span<const Label> labels,
                                const Vocabulary& vocab);

/// Top k columns by statistic, ties by name; the jaccard column is always kept.
/// Returned ascending. Throws std::invalid_argument on length mismatch or when
/// only one class is present.
std::vector<std::uint32_t> chi2_select(std::span<const FeatureVector> vectors,
                                       std::span<const Label> labels, const Vocabulary& vocab,
                                       int k = 300);

void check_version(const FeatureVector& v, const std::string& expected);

}  // namespace concede
