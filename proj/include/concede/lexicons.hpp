#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace concede {

enum class LexTag {
  FirstPerson,
  SecondPerson,
  Modal,
  Hedge,
  Negation,
  Positive,
  Negative,
  Neutral,
  Attitude,
};

std::string_view to_string(LexTag tag);

/// A closed word list. Multiword terms are stored space-separated.
///
/// Two entry shapes get special matching:
///   - clitic entries ("n't") match any token ending with them, since contractions
///     stay whole in tokenization;
///   - "be X" entries match a form of "be" followed within two tokens by X
///     ("you are right", "you are totally correct").
class Lexicon {
 public:
  Lexicon() = default;
  Lexicon(std::string name, std::string version) : name_(std::move(name)), version_(std::move(version)) {}

  const std::string& name() const { return name_; }
  const std::string& version() const { return version_; }
  const std::unordered_map<std::string, LexTag>& entries() const { return entries_; }
  const std::vector<std::string>& warnings() const { return warnings_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  /// Inserts a lowercased term. A term already present keeps its first tag; a
  /// differing tag is recorded as a warning.
  void add(std::string term, LexTag tag, std::string_view origin = {});

  std::optional<LexTag> lookup(std::string_view term) const;

  /// Whether a single token is covered by a one-word or clitic entry.
  bool matches_token(std::string_view token, std::optional<LexTag> tag = std::nullopt) const;

  /// Whether any entry (restricted to tag if given) occurs in the token sequence.
  bool occurs_in(std::span<const std::string> tokens,
                 std::optional<LexTag> tag = std::nullopt) const;

 private:
  std::string name_;
  std::string version_;
  std::unordered_map<std::string, LexTag> entries_;
  std::vector<std::string> clitics_;
  std::vector<std::pair<std::vector<std::string>, LexTag>> phrases_;
  std::vector<std::pair<std::string, LexTag>> be_constructions_;
  std::vector<std::string> warnings_;
};

/// Shipped lists: pronouns, modals, hedges, negation, attitude_indicators, sentiment_verbs.
Lexicon builtin_lexicon(std::string_view name);
std::vector<std::string> builtin_lexicon_names();

/// True for "be" and its inflected or contracted forms ("are", "you're").
bool is_be_form(std::string_view token);

enum class SentimentFormat { Tsv, Mpqa };

/// tsv: `term<TAB>polarity`; mpqa: key=value pairs, word1 and priorpolarity consumed.
Lexicon load_sentiment(const std::filesystem::path& path, SentimentFormat format);

/// Merges b into a copy of a; entries already in a win.
Lexicon merge_lexicons(const Lexicon& a, const Lexicon& b, std::string name);

/// The lexicons consumed by featurization and pattern bootstrapping.
struct LexiconSet {
  Lexicon pronouns = builtin_lexicon("pronouns");
  Lexicon modals = builtin_lexicon("modals");
  Lexicon hedges = builtin_lexicon("hedges");
  Lexicon negation = builtin_lexicon("negation");
  Lexicon attitude = builtin_lexicon("attitude_indicators");
  Lexicon sentiment_verbs = builtin_lexicon("sentiment_verbs");
  Lexicon sentiment;  // empty unless a sentiment lexicon is loaded
};

}  // namespace concede
