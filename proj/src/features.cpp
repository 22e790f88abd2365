#include "concede/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>
#include <stdexcept>

#include "concede/digest.hpp"

namespace concede {

namespace {

struct Table2x2 {
  long a = 0, b = 0, c = 0, d = 0;  // present&arg_c, present&other, absent&arg_c, absent&other
};

// Exact comparison of two statistics over the same N: (ad-bc)^2 / margins.
// Returns <0, 0, >0. Falls back to long double when the products could overflow.
int compare_chi2(const Table2x2& x, const Table2x2& y) {
  auto parts = [](const Table2x2& t, __int128& num, __int128& den) {
    const __int128 diff = static_cast<__int128>(t.a) * t.d - static_cast<__int128>(t.b) * t.c;
    num = diff * diff;
    den = static_cast<__int128>(t.a + t.b) * (t.c + t.d) * (t.a + t.c) * (t.b + t.d);
    if (den == 0) num = 0, den = 1;
  };
  __int128 nx, dx, ny, dy;
  parts(x, nx, dx);
  parts(y, ny, dy);
  const long n = x.a + x.b + x.c + x.d;
  if (n <= 40000) {
    const __int128 l = nx * dy, r = ny * dx;
    return l < r ? -1 : (l > r ? 1 : 0);
  }
  const long double l = static_cast<long double>(nx) / static_cast<long double>(dx);
  const long double r = static_cast<long double>(ny) / static_cast<long double>(dy);
  return l < r ? -1 : (l > r ? 1 : 0);
}

void add_ngram_counts(std::span<const std::string> toks, std::map<std::string, int>& tf) {
  for (std::size_t i = 0; i < toks.size(); ++i) {
    if (is_punctuation(toks[i])) continue;
    ++tf[toks[i]];
    if (i + 1 < toks.size() && !is_punctuation(toks[i + 1])) ++tf[toks[i] + ' ' + toks[i + 1]];
  }
}

std::string vocabulary_version(const std::vector<VocabularyEntry>& entries,
                               const std::map<std::string, double>& idf) {
  std::string blob;
  for (const auto& e : entries) {
    blob += e.name;
    blob += '\x1f';
    blob += to_string(e.kind);
    blob += '\x1e';
  }
  for (const auto& [k, v] : idf) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    blob += k + '\x1f' + buf + '\x1e';
  }
  return "vocab-" + digest_hex(blob);
}

}  // namespace

std::string_view to_string(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::Unigram: return "unigram";
    case FeatureKind::Bigram: return "bigram";
    case FeatureKind::Pronoun: return "pronoun";
    case FeatureKind::Modal: return "modal";
    case FeatureKind::Hedge: return "hedge";
    case FeatureKind::Jaccard: return "jaccard";
    case FeatureKind::Sentiment: return "sentiment";
    case FeatureKind::PatternHit: return "pattern_hit";
  }
  return "unigram";
}

std::optional<FeatureKind> parse_feature_kind(std::string_view s) {
  for (auto k : {FeatureKind::Unigram, FeatureKind::Bigram, FeatureKind::Pronoun,
                 FeatureKind::Modal, FeatureKind::Hedge, FeatureKind::Jaccard,
                 FeatureKind::Sentiment, FeatureKind::PatternHit})
    if (to_string(k) == s) return k;
  return std::nullopt;
}

Vocabulary::Vocabulary(std::vector<VocabularyEntry> entries, std::map<std::string, double> idf)
    : entries_(std::move(entries)), idf_(std::move(idf)) {
  for (std::uint32_t i = 0; i < entries_.size(); ++i) {
    if (!index_.emplace(entries_[i].name, i).second)
      throw std::invalid_argument("duplicate vocabulary entry '" + entries_[i].name + "'");
  }
  version_ = vocabulary_version(entries_, idf_);
}

std::optional<std::uint32_t> Vocabulary::index_of(std::string_view name) const {
  if (auto it = index_.find(std::string(name)); it != index_.end()) return it->second;
  return std::nullopt;
}

Vocabulary Vocabulary::restrict(std::span<const std::uint32_t> columns) const {
  std::vector<std::uint32_t> cols(columns.begin(), columns.end());
  std::sort(cols.begin(), cols.end());
  cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
  std::vector<VocabularyEntry> kept;
  std::map<std::string, double> idf;
  for (auto c : cols) {
    if (c >= entries_.size()) throw std::out_of_range("column " + std::to_string(c));
    kept.push_back(entries_[c]);
    if (auto it = idf_.find(entries_[c].name); it != idf_.end()) idf.insert(*it);
  }
  return Vocabulary(std::move(kept), std::move(idf));
}

double FeatureVector::get(std::uint32_t column) const {
  auto it = std::lower_bound(indices.begin(), indices.end(), column);
  if (it == indices.end() || *it != column) return 0.0;
  return values[static_cast<std::size_t>(it - indices.begin())];
}

TokenSequence feature_span(const MarkerInstance& instance) {
  if (!instance.prev_sentence) return tokenize(instance.sentence);
  return tokenize(*instance.prev_sentence + "\n" + instance.sentence);
}

std::map<std::string, double> ngram_scores(std::span<const MarkerInstance> instances) {
  std::map<std::string, int> max_tf, df;
  for (const auto& inst : instances) {
    std::map<std::string, int> tf;
    add_ngram_counts(feature_span(inst).tokens, tf);
    for (const auto& [g, n] : tf) {
      ++df[g];
      auto& m = max_tf[g];
      m = std::max(m, n);
    }
  }
  const double n_docs = static_cast<double>(instances.size());
  std::map<std::string, double> scores;
  for (const auto& [g, m] : max_tf) scores[g] = m * std::log(n_docs / df[g]);
  return scores;
}

Vocabulary build_vocabulary(std::span<const MarkerInstance> instances,
                            const VocabularyOptions& options) {
  if (instances.empty()) throw std::invalid_argument("build_vocabulary needs at least one instance");
  if (options.k < 0) throw std::invalid_argument("vocabulary size k must be non-negative");

  std::map<std::string, int> df;
  for (const auto& inst : instances) {
    std::map<std::string, int> tf;
    add_ngram_counts(feature_span(inst).tokens, tf);
    for (const auto& kv : tf) ++df[kv.first];
  }
  const auto scores = ngram_scores(instances);
  std::vector<std::pair<std::string, double>> ranked(scores.begin(), scores.end());
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& x, const auto& y) { return x.second > y.second; });
  if (ranked.size() > static_cast<std::size_t>(options.k)) ranked.resize(static_cast<std::size_t>(options.k));

  const double n_docs = static_cast<double>(instances.size());
  std::vector<VocabularyEntry> entries;
  std::map<std::string, double> idf;
  for (const auto& [g, s] : ranked) {
    const bool bigram = g.find(' ') != std::string::npos;
    entries.push_back({g, bigram ? FeatureKind::Bigram : FeatureKind::Unigram});
    idf[g] = std::log(n_docs / df[g]);
  }
  entries.push_back({std::string(column::kFirstPerson), FeatureKind::Pronoun});
  entries.push_back({std::string(column::kSecondPerson), FeatureKind::Pronoun});
  entries.push_back({std::string(column::kModal), FeatureKind::Modal});
  entries.push_back({std::string(column::kHedge), FeatureKind::Hedge});
  if (options.include_jaccard) entries.push_back({std::string(column::kJaccard), FeatureKind::Jaccard});
  entries.push_back({std::string(column::kSentimentPositive), FeatureKind::Sentiment});
  entries.push_back({std::string(column::kSentimentNegative), FeatureKind::Sentiment});
  entries.push_back({std::string(column::kSentimentNeutral), FeatureKind::Sentiment});
  if (options.include_pattern_hit)
    entries.push_back({std::string(column::kPatternHit), FeatureKind::PatternHit});
  return Vocabulary(std::move(entries), std::move(idf));
}

FeatureVector featurize(const MarkerInstance& instance, std::span<const TokenSequence> op_sentences,
                        const Vocabulary& vocab, const LexiconSet& lexicons,
                        const FeaturizeOptions& options) {
  if (options.include_jaccard && op_sentences.empty())
    throw std::invalid_argument("jaccard feature requested for instance '" + instance.id +
                                "' without original-post sentences");
  const auto span = feature_span(instance);
  const auto& toks = span.tokens;

  std::map<std::uint32_t, double> cells;
  std::map<std::string, int> tf;
  add_ngram_counts(toks, tf);
  for (const auto& [g, n] : tf)
    if (auto col = vocab.index_of(g)) cells[*col] = n;

  auto flag = [&](std::string_view name, bool on) {
    if (!on) return;
    if (auto col = vocab.index_of(name)) cells[*col] = 1.0;
  };
  flag(column::kFirstPerson, lexicons.pronouns.occurs_in(toks, LexTag::FirstPerson));
  flag(column::kSecondPerson, lexicons.pronouns.occurs_in(toks, LexTag::SecondPerson));
  flag(column::kModal, lexicons.modals.occurs_in(toks));
  flag(column::kHedge, lexicons.hedges.occurs_in(toks));
  flag(column::kSentimentPositive, lexicons.sentiment.occurs_in(toks, LexTag::Positive));
  flag(column::kSentimentNegative, lexicons.sentiment.occurs_in(toks, LexTag::Negative));
  flag(column::kSentimentNeutral, lexicons.sentiment.occurs_in(toks, LexTag::Neutral));
  flag(column::kPatternHit, options.pattern_hit);

  if (options.include_jaccard) {
    if (auto col = vocab.index_of(column::kJaccard)) {
      const auto& stop = default_stopwords();
      double best = 0.0;
      for (const auto& op : op_sentences) best = std::max(best, jaccard(toks, op.tokens, stop));
      if (best > 0.0) cells[*col] = best;
    }
  }

  FeatureVector v;
  v.vocabulary_version = vocab.version();
  v.indices.reserve(cells.size());
  v.values.reserve(cells.size());
  for (const auto& [c, x] : cells) {
    v.indices.push_back(c);
    v.values.push_back(x);
  }
  return v;
}

double chi2_2x2(long a, long b, long c, long d) {
  const double n = static_cast<double>(a + b + c + d);
  const double den = static_cast<double>(a + b) * static_cast<double>(c + d) *
                     static_cast<double>(a + c) * static_cast<double>(b + d);
  if (den == 0.0) return 0.0;
  const double diff = static_cast<double>(a) * d - static_cast<double>(b) * c;
  return n * diff * diff / den;
}

namespace {

std::vector<Table2x2> column_tables(std::span<const FeatureVector> vectors,
                                    std::span<const Label> labels, const Vocabulary& vocab) {
  if (vectors.size() != labels.size())
    throw std::invalid_argument("chi2: vectors and labels differ in length");
  long pos = 0;
  for (auto l : labels) pos += l == Label::ArgC;
  const long neg = static_cast<long>(labels.size()) - pos;
  if (pos == 0 || neg == 0) throw std::invalid_argument("chi2: both classes must be present");

  std::vector<Table2x2> t(vocab.size());
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    check_version(vectors[i], vocab.version());
    const bool argc = labels[i] == Label::ArgC;
    for (std::size_t k = 0; k < vectors[i].indices.size(); ++k) {
      if (!(vectors[i].values[k] > 0.0)) continue;
      auto& cell = t.at(vectors[i].indices[k]);
      (argc ? cell.a : cell.b) += 1;
    }
  }
  for (auto& cell : t) {
    cell.c = pos - cell.a;
    cell.d = neg - cell.b;
  }
  return t;
}

}  // namespace

std::vector<double> chi2_scores(std::span<const FeatureVector> vectors, std::span<const Label> labels,
                                const Vocabulary& vocab) {
  auto tables = column_tables(vectors, labels, vocab);
  std::vector<double> out;
  out.reserve(tables.size());
  for (const auto& t : tables) out.push_back(chi2_2x2(t.a, t.b, t.c, t.d));
  return out;
}

std::vector<std::uint32_t> chi2_select(std::span<const FeatureVector> vectors,
                                       std::span<const Label> labels, const Vocabulary& vocab,
                                       int k) {
  if (k < 0) throw std::invalid_argument("chi2_select: k must be non-negative");
  const auto tables = column_tables(vectors, labels, vocab);
  std::vector<std::uint32_t> order(vocab.size());
  std::iota(order.begin(), order.end(), 0u);
  const auto& entries = vocab.entries();
  std::sort(order.begin(), order.end(), [&](std::uint32_t x, std::uint32_t y) {
    const int c = compare_chi2(tables[x], tables[y]);
    if (c != 0) return c > 0;
    return entries[x].name < entries[y].name;
  });
  if (order.size() > static_cast<std::size_t>(k)) order.resize(static_cast<std::size_t>(k));
  if (auto j = vocab.index_of(column::kJaccard);
      j && std::find(order.begin(), order.end(), *j) == order.end())
    order.push_back(*j);
  std::sort(order.begin(), order.end());
  return order;
}

void check_version(const FeatureVector& v, const std::string& expected) {
  if (v.vocabulary_version != expected) throw VersionMismatchError(expected, v.vocabulary_version);
}

}  // namespace concede
