#pragma once

#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "concede/corpus.hpp"
#include "concede/features.hpp"
#include "concede/lexicons.hpp"
#include "concede/patterns.hpp"
#include "concede/selftrain.hpp"
#include "concede/svm.hpp"

namespace concede {

using OpIndex = std::unordered_map<std::string, std::vector<TokenSequence>>;

struct FeatureConfig {
  int vocab_k = 1000;
  int chi2_k = 300;
  bool include_jaccard = true;
  bool include_pattern_hit = false;
};

/// Featurization bound to one vocabulary, lexicon set, curated pattern list and
/// original-post index. Instances whose thread has no original post get a zero
/// jaccard value.
class Featurizer {
 public:
  Featurizer(Vocabulary vocab, LexiconSet lexicons, std::vector<LexicalPattern> patterns,
             OpIndex op_sentences, bool include_jaccard);

  const Vocabulary& vocabulary() const { return vocab_; }
  const LexiconSet& lexicons() const { return lexicons_; }
  const std::vector<LexicalPattern>& patterns() const { return patterns_; }
  bool include_jaccard() const { return include_jaccard_; }

  bool pattern_match(const MarkerInstance& instance) const;
  FeatureVector operator()(const MarkerInstance& instance) const;
  PreparedInstance prepare(const MarkerInstance& instance) const;
  std::vector<PreparedInstance> prepare_all(std::span<const MarkerInstance> instances,
                                            int jobs = 1) const;

 private:
  FeatureVector featurize_with(const MarkerInstance& instance, bool hit) const;

  Vocabulary vocab_;
  LexiconSet lexicons_;
  std::vector<LexicalPattern> patterns_;
  OpIndex op_;
  bool include_jaccard_;
};

/// True when any pattern matches the instance's conceding span.
bool any_pattern_matches(const MarkerInstance& instance, std::span<const LexicalPattern> patterns,
                         const Lexicon& negation);

/// arg_c on a curated pattern match, else the sign of the model's decision.
Label combine_predict(const MarkerInstance& instance, std::span<const LexicalPattern> patterns,
                      const SvmModel& model, const Featurizer& featurizer);

struct FittedFeatures {
  Vocabulary full;
  Vocabulary selected;
  std::vector<double> chi2;  // per column of `full`
};

/// Vocabulary on the training instances, then chi-square selection against
/// their labels.
FittedFeatures fit_features(std::span<const MarkerInstance> train, std::span<const Label> labels,
                            const LexiconSet& lexicons, std::span<const LexicalPattern> patterns,
                            const OpIndex& op_sentences, const FeatureConfig& config, int jobs = 1);

}  // namespace concede
