#include "concede/patterns.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

namespace concede {

namespace {

constexpr std::string_view kGapToken = "[*]";

bool is_clause_boundary(std::string_view tok) {
  if (tok == "," || tok == ";" || tok == ":") return true;
  return !tok.empty() && std::all_of(tok.begin(), tok.end(),
                                     [](char c) { return c == '.' || c == '!' || c == '?'; });
}

TokenSequence slice(const TokenSequence& seq, std::size_t b, std::size_t e) {
  TokenSequence out;
  out.tokens.assign(seq.tokens.begin() + static_cast<std::ptrdiff_t>(b),
                    seq.tokens.begin() + static_cast<std::ptrdiff_t>(e));
  out.spans.assign(seq.spans.begin() + static_cast<std::ptrdiff_t>(b),
                   seq.spans.begin() + static_cast<std::ptrdiff_t>(e));
  return out;
}

// Depth-first match of elements[ei..] against tokens[ti..]; `dead` memoizes failures.
bool match_from(const std::vector<PatternElement>& el, std::span<const std::string> tokens,
                const Lexicon& negation, std::size_t ei, std::size_t ti,
                std::vector<char>& dead) {
  if (ei == el.size()) return true;
  const std::size_t key = ei * (tokens.size() + 1) + ti;
  if (dead[key]) return false;
  bool ok = false;
  if (!el[ei].gap) {
    ok = ti < tokens.size() && tokens[ti] == el[ei].literal &&
         match_from(el, tokens, negation, ei + 1, ti + 1, dead);
  } else {
    for (std::size_t k = ti; k <= tokens.size(); ++k) {
      if (match_from(el, tokens, negation, ei + 1, k, dead)) {
        ok = true;
        break;
      }
      if (k < tokens.size() && negation.matches_token(tokens[k])) break;
    }
  }
  if (!ok) dead[key] = 1;
  return ok;
}

// Seeds are searched with a gap between every pair of literals ("[...] i [...] agree [...]").
LexicalPattern search_template(const LexicalPattern& p) {
  if (p.provenance != Provenance::Seed) return p;
  LexicalPattern t = p;
  t.elements.clear();
  for (const auto& e : p.elements) {
    if (!t.elements.empty() && !t.elements.back().gap && !e.gap)
      t.elements.push_back(PatternElement::wildcard());
    t.elements.push_back(e);
  }
  return t;
}

struct NgramIndex {
  std::vector<std::vector<std::string>> grams;  // sorted by joined text
  std::unordered_map<std::string, std::vector<std::size_t>> postings;

  explicit NgramIndex(std::span<const ConcedingSpan> spans) {
    std::map<std::string, std::vector<std::string>> uniq;
    for (const auto& s : spans) {
      const auto& toks = s.tokens.tokens;
      for (std::size_t n = 3; n <= 5; ++n) {
        for (std::size_t i = 0; i + n <= toks.size(); ++i) {
          std::vector<std::string> g(toks.begin() + static_cast<std::ptrdiff_t>(i),
                                     toks.begin() + static_cast<std::ptrdiff_t>(i + n));
          if (std::any_of(g.begin(), g.end(), [](const auto& t) { return is_punctuation(t); }))
            continue;
          std::string key = g.front();
          for (std::size_t k = 1; k < g.size(); ++k) key += ' ' + g[k];
          uniq.emplace(std::move(key), std::move(g));
        }
      }
    }
    grams.reserve(uniq.size());
    for (auto& [key, g] : uniq) {
      const std::size_t id = grams.size();
      std::set<std::string_view> distinct(g.begin(), g.end());
      for (auto t : distinct) postings[std::string(t)].push_back(id);
      grams.push_back(std::move(g));
    }
  }

  std::vector<std::size_t> realize(const LexicalPattern& tmpl, const Lexicon& negation) const {
    const std::vector<std::size_t>* best = nullptr;
    for (const auto& e : tmpl.elements) {
      if (e.gap) continue;
      auto it = postings.find(e.literal);
      if (it == postings.end()) return {};
      if (!best || it->second.size() < best->size()) best = &it->second;
    }
    std::vector<std::size_t> out;
    if (!best) return out;
    for (auto id : *best)
      if (match(tmpl, grams[id], negation)) out.push_back(id);
    return out;
  }
};

std::string join(std::span<const std::string> toks) {
  std::string s;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    if (i) s += ' ';
    s += toks[i];
  }
  return s;
}

}  // namespace

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::Seed: return "seed";
    case Provenance::Bootstrapped: return "bootstrapped";
    case Provenance::Curated: return "curated";
  }
  return "curated";
}

void validate(const LexicalPattern& p) {
  if (p.elements.empty()) throw std::invalid_argument("pattern is empty");
  if (p.elements.front().gap) throw std::invalid_argument("pattern starts with a gap");
  if (p.elements.back().gap) throw std::invalid_argument("pattern ends with a gap");
  for (std::size_t i = 1; i < p.elements.size(); ++i)
    if (p.elements[i].gap && p.elements[i - 1].gap)
      throw std::invalid_argument("pattern has adjacent gaps");
  for (const auto& e : p.elements)
    if (!e.gap && e.literal.empty()) throw std::invalid_argument("pattern has an empty literal");
}

LexicalPattern LexicalPattern::parse(std::string_view text, Provenance provenance,
                                     int generation) {
  LexicalPattern p;
  p.provenance = provenance;
  p.generation = generation;
  std::istringstream in{std::string(text)};
  std::string word;
  while (in >> word) {
    if (word == kGapToken) {
      p.elements.push_back(PatternElement::wildcard());
      continue;
    }
    for (auto& t : tokenize(word).tokens) p.elements.push_back(PatternElement::word(std::move(t)));
  }
  validate(p);
  return p;
}

LexicalPattern LexicalPattern::from_tokens(std::span<const std::string> tokens,
                                           Provenance provenance, int generation) {
  LexicalPattern p;
  p.provenance = provenance;
  p.generation = generation;
  for (const auto& t : tokens) p.elements.push_back(PatternElement::word(t));
  validate(p);
  return p;
}

std::string LexicalPattern::text() const {
  std::string s;
  for (const auto& e : elements) {
    if (!s.empty()) s += ' ';
    s += e.gap ? std::string(kGapToken) : e.literal;
  }
  return s;
}

std::vector<std::string> LexicalPattern::literals() const {
  std::vector<std::string> out;
  for (const auto& e : elements)
    if (!e.gap) out.push_back(e.literal);
  return out;
}

bool LexicalPattern::has_gap() const {
  return std::any_of(elements.begin(), elements.end(), [](const auto& e) { return e.gap; });
}

ConcedingSpan conceding_span(const MarkerInstance& instance) {
  ConcedingSpan span;
  span.source_instance = instance.id;
  auto toks = tokenize(instance.sentence);
  const auto idx = std::min(static_cast<std::size_t>(std::max(instance.marker_token_index, 0)),
                            toks.size());
  if (instance.marker == Marker::While) {
    std::size_t end = std::min(idx + 1, toks.size());
    while (end < toks.size() && !is_clause_boundary(toks.tokens[end])) ++end;
    span.tokens = slice(toks, std::min(idx + 1, toks.size()), end);
    return span;
  }
  bool initial = std::all_of(toks.tokens.begin(), toks.tokens.begin() + static_cast<std::ptrdiff_t>(idx),
                             [](const auto& t) { return is_punctuation(t); });
  if (initial) {
    if (instance.prev_sentence) span.tokens = tokenize(*instance.prev_sentence);
    return span;
  }
  span.tokens = slice(toks, 0, idx);
  return span;
}

bool match(const LexicalPattern& pattern, std::span<const std::string> tokens,
           const Lexicon& negation) {
  if (pattern.elements.empty()) return false;
  std::vector<char> dead((pattern.elements.size() + 1) * (tokens.size() + 1), 0);
  for (std::size_t start = 0; start < tokens.size(); ++start) {
    if (!pattern.elements.front().gap && tokens[start] != pattern.elements.front().literal)
      continue;
    if (match_from(pattern.elements, tokens, negation, 0, start, dead)) return true;
  }
  return false;
}

bool match(const LexicalPattern& pattern, const ConcedingSpan& span, const Lexicon& negation) {
  return match(pattern, span.tokens.tokens, negation);
}

bool has_attitude_or_sentiment(std::span<const std::string> tokens, const LexiconSet& lex) {
  return lex.attitude.occurs_in(tokens) || lex.sentiment_verbs.occurs_in(tokens);
}

bool has_second_person(std::span<const std::string> tokens, const LexiconSet& lex) {
  return lex.pronouns.occurs_in(tokens, LexTag::SecondPerson);
}

std::vector<LexicalPattern> default_seeds() {
  return {LexicalPattern::parse("i agree", Provenance::Seed, 0),
          LexicalPattern::parse("you are right", Provenance::Seed, 0)};
}

BootstrapResult bootstrap(std::span<const ConcedingSpan> spans,
                          std::span<const LexicalPattern> seeds, const LexiconSet& lexicons,
                          const BootstrapOptions& options) {
  if (seeds.empty()) throw std::invalid_argument("bootstrap needs at least one seed pattern");
  const NgramIndex index(spans);
  const Lexicon& negation = lexicons.negation;

  struct Entry {
    LexicalPattern pattern;
    bool generalized;
  };
  std::map<std::string, Entry> known;
  std::vector<LexicalPattern> frontier;
  for (const auto& s : seeds) {
    validate(s);
    LexicalPattern seed = s;
    seed.generation = 0;
    if (known.emplace(seed.text(), Entry{seed, false}).second) frontier.push_back(seed);
  }

  auto collect = [&](int iterations) {
    BootstrapResult r;
    std::vector<const Entry*> all;
    for (const auto& [k, e] : known) all.push_back(&e);
    std::stable_sort(all.begin(), all.end(), [](const Entry* a, const Entry* b) {
      return a->pattern.generation < b->pattern.generation;
    });
    for (const auto* e : all) {
      r.patterns.push_back(e->pattern);
      r.generalized.push_back(e->generalized);
    }
    r.iterations = iterations;
    return r;
  };

  for (int iter = 1;; ++iter) {
    if (iter > options.max_iterations)
      throw BootstrapNonConvergence(options.max_iterations, collect(options.max_iterations));

    // Instantiation: n-grams realizing a current pattern become concrete patterns.
    std::map<std::string, LexicalPattern> instantiated;
    for (const auto& p : frontier) {
      for (auto id : index.realize(search_template(p), negation)) {
        const auto& g = index.grams[id];
        auto key = join(g);
        if (known.contains(key) || instantiated.contains(key)) continue;
        instantiated.emplace(std::move(key),
                             LexicalPattern::from_tokens(g, Provenance::Bootstrapped, iter));
      }
    }

    // Generalization: one interior literal becomes a gap and the search is re-run.
    std::map<std::string, LexicalPattern> generalized;
    auto generalize = [&](const LexicalPattern& q) {
      const auto& el = q.elements;
      for (std::size_t k = 1; k + 1 < el.size(); ++k) {
        if (el[k].gap || el[k - 1].gap || el[k + 1].gap) continue;
        LexicalPattern tmpl = q;
        tmpl.provenance = Provenance::Bootstrapped;
        tmpl.elements[k] = PatternElement::wildcard();
        for (auto id : index.realize(tmpl, negation)) {
          const auto& g = index.grams[id];
          auto key = join(g);
          if (known.contains(key) || instantiated.contains(key) || generalized.contains(key))
            continue;
          if (!has_attitude_or_sentiment(g, lexicons) && !has_second_person(g, lexicons)) continue;
          generalized.emplace(std::move(key),
                              LexicalPattern::from_tokens(g, Provenance::Bootstrapped, iter));
        }
      }
    };
    for (const auto& p : frontier) generalize(p);
    for (const auto& [k, p] : instantiated) generalize(p);

    if (instantiated.empty() && generalized.empty()) return collect(iter);

    frontier.clear();
    for (auto& [k, p] : instantiated) {
      frontier.push_back(p);
      known.emplace(k, Entry{std::move(p), false});
    }
    for (auto& [k, p] : generalized) {
      frontier.push_back(p);
      known.emplace(k, Entry{std::move(p), true});
    }
  }
}

std::vector<PatternReportRow> pattern_report(const BootstrapResult& result,
                                             std::span<const ConcedingSpan> spans,
                                             const LexiconSet& lexicons) {
  std::vector<PatternReportRow> rows;
  rows.reserve(result.patterns.size());
  for (std::size_t i = 0; i < result.patterns.size(); ++i) {
    const auto& p = result.patterns[i];
    PatternReportRow row;
    row.pattern = p.text();
    row.provenance = p.provenance;
    row.generation = p.generation;
    row.generalized = i < result.generalized.size() && result.generalized[i];
    const auto lits = p.literals();
    row.rule_attitude = has_attitude_or_sentiment(lits, lexicons);
    row.rule_second_person = has_second_person(lits, lexicons);
    for (const auto& s : spans)
      if (match(p, s, lexicons.negation)) ++row.span_matches;
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<LexicalPattern> parse_patterns(std::istream& in, Provenance provenance) {
  std::vector<LexicalPattern> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(LexicalPattern::parse(line, provenance, 0));
    } catch (const std::invalid_argument& e) {
      throw DataError(std::string("invalid pattern: ") + e.what(), lineno);
    }
  }
  return out;
}

std::vector<LexicalPattern> load_curated(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open pattern file " + path.string());
  return parse_patterns(in, Provenance::Curated);
}

void write_patterns(std::ostream& out, std::span<const LexicalPattern> patterns) {
  for (const auto& p : patterns) out << p.text() << '\n';
}

}  // namespace concede
