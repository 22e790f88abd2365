#include <doctest.h>

#include <fstream>

#include "concede/lexicons.hpp"
#include "concede/textproc.hpp"
#include "concede/types.hpp"

using namespace concede;

namespace {

std::vector<std::string> toks(std::string_view s) { return tokenize(s).tokens; }

std::string write_temp(const std::string& name, const std::string& content) {
  std::ofstream(name) << content;
  return name;
}

}  // namespace

TEST_SUITE("lexicons") {
  TEST_CASE("builtin lexicons") {
    auto pronouns = builtin_lexicon("pronouns");
    CHECK(pronouns.lookup("you") == LexTag::SecondPerson);
    CHECK(pronouns.lookup("my") == LexTag::FirstPerson);
    CHECK_FALSE(pronouns.lookup("they"));
    CHECK(builtin_lexicon("modals").matches_token("should"));
    CHECK(builtin_lexicon("hedges").version() == "hedges-1");
    CHECK_THROWS_AS(builtin_lexicon("nope"), std::invalid_argument);
  }

  TEST_CASE("negation clitic matches contractions") {
    auto neg = builtin_lexicon("negation");
    CHECK(neg.matches_token("don't"));
    CHECK(neg.matches_token("isn't"));
    CHECK(neg.matches_token("never"));
    CHECK_FALSE(neg.matches_token("dont"));
    CHECK(neg.occurs_in(toks("I wouldn't say that")));
  }

  TEST_CASE("be-constructions allow one intervening token") {
    auto att = builtin_lexicon("attitude_indicators");
    CHECK(att.occurs_in(toks("you are right")));
    CHECK(att.occurs_in(toks("You're totally correct")));
    CHECK(att.occurs_in(toks("I think so")));
    CHECK_FALSE(att.occurs_in(toks("you are very very right")));
    CHECK_FALSE(att.occurs_in(toks("turn right")));
  }

  TEST_CASE("be forms") {
    CHECK(is_be_form("were"));
    CHECK(is_be_form("you're"));
    CHECK(is_be_form("i'm"));
    CHECK_FALSE(is_be_form("bee"));
  }

  TEST_CASE("multiword entries match contiguously") {
    Lexicon lex("t", "t-1");
    lex.add("sort of", LexTag::Hedge);
    CHECK(lex.occurs_in(toks("it is sort of fine")));
    CHECK_FALSE(lex.occurs_in(toks("sort it of")));
    CHECK(lex.occurs_in(toks("sort of"), LexTag::Hedge));
    CHECK_FALSE(lex.occurs_in(toks("sort of"), LexTag::Modal));
  }

  TEST_CASE("conflicting tags keep the first and warn") {
    Lexicon lex("t", "t-1");
    lex.add("good", LexTag::Positive);
    lex.add("Good", LexTag::Negative, "second");
    lex.add("good", LexTag::Positive);
    CHECK(lex.lookup("good") == LexTag::Positive);
    CHECK(lex.size() == 1);
    REQUIRE(lex.warnings().size() == 1);
  }

  TEST_CASE("tsv sentiment loader") {
    auto p = write_temp("sent_test.tsv", "# header\ngood\tpositive\nbad\tnegative\r\nmeh\tneutral\n");
    auto lex = load_sentiment(p, SentimentFormat::Tsv);
    CHECK(lex.size() == 3);
    CHECK(lex.lookup("bad") == LexTag::Negative);
    CHECK(lex.version().starts_with("sentiment-"));
    write_temp("sent_bad.tsv", "good\tpositive\nbad\n");
    try {
      load_sentiment("sent_bad.tsv", SentimentFormat::Tsv);
      FAIL("expected DataError");
    } catch (const DataError& e) {
      CHECK(e.line() == 2);
    }
  }

  TEST_CASE("mpqa sentiment loader") {
    auto p = write_temp("sent_test.mpqa",
                        "type=weaksubj len=1 word1=abandon pos1=verb stemmed1=y priorpolarity=negative\n"
                        "type=strongsubj len=1 word1=able pos1=adj stemmed1=n priorpolarity=positive\n"
                        "type=weaksubj len=1 word1=brag pos1=verb stemmed1=y priorpolarity=both\n"
                        "type=weaksubj len=1 word1=meh pos1=adj stemmed1=n priorpolarity=weakneg\n");
    auto lex = load_sentiment(p, SentimentFormat::Mpqa);
    CHECK(lex.lookup("abandon") == LexTag::Negative);
    CHECK(lex.lookup("able") == LexTag::Positive);
    CHECK(lex.lookup("brag") == LexTag::Neutral);
    CHECK(lex.lookup("meh") == LexTag::Negative);
    write_temp("sent_bad.mpqa", "type=weaksubj word1=x\n");
    CHECK_THROWS_AS(load_sentiment("sent_bad.mpqa", SentimentFormat::Mpqa), DataError);
  }

  TEST_CASE("merge keeps entries of the first lexicon") {
    Lexicon a("a", "a-1"), b("b", "b-1");
    a.add("like", LexTag::Positive);
    b.add("like", LexTag::Negative);
    b.add("hate", LexTag::Negative);
    auto m = merge_lexicons(a, b, "m");
    CHECK(m.lookup("like") == LexTag::Positive);
    CHECK(m.lookup("hate") == LexTag::Negative);
    CHECK(m.warnings().size() == 1);
  }
}
