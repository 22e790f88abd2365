#include "concede/detector.hpp"

#include "concede/parallel.hpp"

namespace concede {

Featurizer::Featurizer(Vocabulary vocab, LexiconSet lexicons, std::vector<LexicalPattern> patterns,
                       OpIndex op_sentences, bool include_jaccard)
    : vocab_(std::move(vocab)),
      lexicons_(std::move(lexicons)),
      patterns_(std::move(patterns)),
      op_(std::move(op_sentences)),
      include_jaccard_(include_jaccard) {}

bool any_pattern_matches(const MarkerInstance& instance, std::span<const LexicalPattern> patterns,
                         const Lexicon& negation) {
  if (patterns.empty()) return false;
  const auto span = conceding_span(instance);
  for (const auto& p : patterns)
    if (match(p, span, negation)) return true;
  return false;
}

bool Featurizer::pattern_match(const MarkerInstance& instance) const {
  return any_pattern_matches(instance, patterns_, lexicons_.negation);
}

FeatureVector Featurizer::featurize_with(const MarkerInstance& instance, bool hit) const {
  FeaturizeOptions opts;
  opts.pattern_hit = hit;
  std::span<const TokenSequence> op;
  if (include_jaccard_) {
    if (auto it = op_.find(instance.thread_id); it != op_.end() && !it->second.empty())
      op = it->second;
  }
  opts.include_jaccard = !op.empty();
  return featurize(instance, op, vocab_, lexicons_, opts);
}

FeatureVector Featurizer::operator()(const MarkerInstance& instance) const {
  const bool hit = vocab_.has(column::kPatternHit) && pattern_match(instance);
  return featurize_with(instance, hit);
}

PreparedInstance Featurizer::prepare(const MarkerInstance& instance) const {
  PreparedInstance p;
  p.id = instance.id;
  p.pattern_match = pattern_match(instance);
  p.x = featurize_with(instance, p.pattern_match);
  return p;
}

std::vector<PreparedInstance> Featurizer::prepare_all(std::span<const MarkerInstance> instances,
                                                      int jobs) const {
  std::vector<PreparedInstance> out(instances.size());
  parallel_for(instances.size(), jobs, [&](std::size_t i) { out[i] = prepare(instances[i]); });
  return out;
}

Label combine_predict(const MarkerInstance& instance, std::span<const LexicalPattern> patterns,
                      const SvmModel& model, const Featurizer& featurizer) {
  if (any_pattern_matches(instance, patterns, featurizer.lexicons().negation)) return Label::ArgC;
  return label_from_decision(decision(model, featurizer(instance)));
}

FittedFeatures fit_features(std::span<const MarkerInstance> train, std::span<const Label> labels,
                            const LexiconSet& lexicons, std::span<const LexicalPattern> patterns,
                            const OpIndex& op_sentences, const FeatureConfig& config, int jobs) {
  VocabularyOptions vo;
  vo.k = config.vocab_k;
  vo.include_jaccard = config.include_jaccard;
  vo.include_pattern_hit = config.include_pattern_hit;
  FittedFeatures f;
  f.full = build_vocabulary(train, vo);
  Featurizer fz(f.full, lexicons, {patterns.begin(), patterns.end()}, op_sentences,
                config.include_jaccard);
  std::vector<FeatureVector> xs(train.size());
  parallel_for(train.size(), jobs, [&](std::size_t i) { xs[i] = fz(train[i]); });
  f.chi2 = chi2_scores(xs, labels, f.full);
  f.selected = f.full.restrict(chi2_select(xs, labels, f.full, config.chi2_k));
  return f;
}

}  // namespace concede
