#pragma once

#include <filesystem>
#include <istream>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "concede/corpus.hpp"
#include "concede/lexicons.hpp"
#include "concede/textproc.hpp"

namespace concede {

/// A literal token, or a gap standing for zero or more non-negation tokens.
struct PatternElement {
  bool gap = false;
  std::string literal;

  static PatternElement word(std::string w) { return {false, std::move(w)}; }
  static PatternElement wildcard() { return {true, {}}; }
  bool operator==(const PatternElement&) const = default;
};

enum class Provenance { Seed, Bootstrapped, Curated };
std::string_view to_string(Provenance p);

struct LexicalPattern {
  std::vector<PatternElement> elements;
  Provenance provenance = Provenance::Curated;
  int generation = 0;

  /// Whitespace-separated literals with "[*]" for a gap. Throws std::invalid_argument
  /// when the result violates the pattern invariants.
  static LexicalPattern parse(std::string_view text, Provenance provenance = Provenance::Curated,
                              int generation = 0);
  static LexicalPattern from_tokens(std::span<const std::string> tokens, Provenance provenance,
                                    int generation);

  /// Canonical text form, e.g. "i [*] agree".
  std::string text() const;
  std::vector<std::string> literals() const;
  bool has_gap() const;
};

/// Throws std::invalid_argument naming the broken invariant.
void validate(const LexicalPattern& p);

/// The tokens holding the conceding proposition of an instance.
struct ConcedingSpan {
  TokenSequence tokens;
  std::string source_instance;
};

/// but/though/however: tokens before the marker, or the whole previous sentence
/// when the marker opens its sentence. while: tokens after the marker up to the
/// first clause boundary (comma, semicolon, colon or sentence end).
ConcedingSpan conceding_span(const MarkerInstance& instance);

/// Literals must occur in order; adjacent literals are contiguous and a gap absorbs
/// zero or more tokens, none of them a negation. The match may start anywhere.
bool match(const LexicalPattern& pattern, std::span<const std::string> tokens,
           const Lexicon& negation);
bool match(const LexicalPattern& pattern, const ConcedingSpan& span, const Lexicon& negation);

/// Rule (i): an attitude indicator or a sentiment verb occurs among the tokens.
bool has_attitude_or_sentiment(std::span<const std::string> tokens, const LexiconSet& lex);
/// Rule (ii): a second-person pronoun or adjective occurs among the tokens.
bool has_second_person(std::span<const std::string> tokens, const LexiconSet& lex);

/// "i agree" and "you are right".
std::vector<LexicalPattern> default_seeds();

struct BootstrapOptions {
  int max_iterations = 20;
};

struct BootstrapResult {
  /// Sorted by (generation, text); seeds first.
  std::vector<LexicalPattern> patterns;
  /// Parallel to `patterns`: true when the pattern came from a generalization search.
  std::vector<bool> generalized;
  /// Iterations run, including the final one that found nothing new.
  int iterations = 0;
};

class BootstrapNonConvergence : public std::runtime_error {
 public:
  BootstrapNonConvergence(int cap, BootstrapResult partial)
      : std::runtime_error("pattern bootstrap did not converge within " + std::to_string(cap) +
                           " iterations"),
        partial_(std::move(partial)) {}
  const BootstrapResult& partial() const { return partial_; }

 private:
  BootstrapResult partial_;
};

/// Grows a pattern set from the seeds over the 3/4/5-grams of the spans until no
/// new pattern appears. Each iteration instantiates the current patterns against
/// the n-grams, then generalizes patterns by turning one interior literal into a
/// gap; a generalization-derived pattern is kept only if it satisfies rule (i)
/// or rule (ii). The result does not depend on span order.
BootstrapResult bootstrap(std::span<const ConcedingSpan> spans,
                          std::span<const LexicalPattern> seeds, const LexiconSet& lexicons,
                          const BootstrapOptions& options = {});

struct PatternReportRow {
  std::string pattern;
  Provenance provenance = Provenance::Bootstrapped;
  int generation = 0;
  bool generalized = false;
  std::size_t span_matches = 0;
  bool rule_attitude = false;
  bool rule_second_person = false;
};

std::vector<PatternReportRow> pattern_report(const BootstrapResult& result,
                                             std::span<const ConcedingSpan> spans,
                                             const LexiconSet& lexicons);

/// Pattern file: one pattern per line, "[*]" for a gap, '#' comments.
std::vector<LexicalPattern> parse_patterns(std::istream& in,
                                           Provenance provenance = Provenance::Curated);
std::vector<LexicalPattern> load_curated(const std::filesystem::path& path);
void write_patterns(std::ostream& out, std::span<const LexicalPattern> patterns);

}  // namespace concede
