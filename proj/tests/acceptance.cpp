// Acceptance checks. One PASS/FAIL/SKIP line per criterion; the exit status is
// nonzero when any criterion fails.

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "concede/cli.hpp"
#include "concede/corpus.hpp"
#include "concede/detector.hpp"
#include "concede/eval.hpp"
#include "concede/features.hpp"
#include "concede/patterns.hpp"
#include "concede/selftrain.hpp"
#include "concede/svm.hpp"
#include "concede/textproc.hpp"
#include "support.hpp"
#include "synthetic.hpp"

using namespace concede;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  enum Status { Pass, Fail, Skip } status = Pass;
  std::vector<std::string> notes;

  void check(bool ok, const std::string& what) {
    if (!ok) status = Fail;
    notes.push_back((ok ? "ok: " : "FAILED: ") + what);
  }
  void note(const std::string& what) { notes.push_back(what); }
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// 1 ------------------------------------------------------------------------

Outcome smo_oracle() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(20240601);
  const double cs[] = {0.5, 1.0, 10.0};
  const double gammas[] = {0.1, 1.0};
  std::uniform_int_distribution<int> dims(2, 8);
  double worst_diff = 0.0, worst_box = 0.0, worst_eq = 0.0;
  int missing_oracle = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const auto d = support::random_dataset(rng, 6, dims(rng));
    SvmConfig cfg;
    cfg.c = cs[trial % 3];
    cfg.gamma = gammas[(trial / 3) % 2];
    cfg.tolerance = 1e-6;
    cfg.max_passes = 100000;
    std::vector<std::vector<double>> probes;
    std::uniform_real_distribution<double> coord(-2.0, 2.0);
    for (int k = 0; k < 3; ++k) {
      std::vector<double> p(d.points.front().size());
      for (auto& v : p) v = coord(rng);
      probes.push_back(std::move(p));
    }
    const auto cmp = support::compare_with_oracle(d, cfg, probes);
    if (!cmp.oracle_found) ++missing_oracle;
    worst_diff = std::max(worst_diff, cmp.max_decision_diff);
    worst_box = std::max(worst_box, cmp.max_box_violation);
    worst_eq = std::max(worst_eq, cmp.equality_residual);
  }
  const double secs = seconds_since(t0);
  o.check(missing_oracle == 0, "oracle solved every dataset (" + std::to_string(missing_oracle) + " unsolved)");
  o.check(worst_diff < 1e-4, "max |decision - oracle| = " + fmt("%.3g", worst_diff) + " < 1e-4");
  o.check(worst_box <= 1e-8, "max box violation = " + fmt("%.3g", worst_box) + " <= 1e-8");
  o.check(worst_eq <= 1e-8, "max |sum alpha*y| = " + fmt("%.3g", worst_eq) + " <= 1e-8");
  o.check(secs < 60.0, "runtime " + fmt("%.2f", secs) + " s < 60 s");
  return o;
}

// 2 ------------------------------------------------------------------------

Outcome statistics() {
  Outcome o;
  const auto r = chi2_independence({{10, 20}, {20, 10}});
  o.check(std::abs(r.stat - 20.0 / 3.0) <= 1e-9, "chi2 stat " + fmt("%.12f", r.stat) + " vs 20/3 within 1e-9");
  o.check(r.df == 1, "df = 1");
  o.check(std::abs(r.p_value - 0.0098) <= 1e-4, "p " + fmt("%.6f", r.p_value) + " vs 0.0098 within 1e-4");
  const double crit = chi2_sf(3.841, 1);
  o.check(std::abs(crit - 0.05) <= 1e-3, "sf(3.841, df=1) = " + fmt("%.6f", crit) + " vs 0.05 within 1e-3");

  // The classic 10-item, 14-rater, 5-category table; kappa 0.210.
  const std::vector<std::vector<int>> fleiss = {
      {0, 0, 0, 0, 14}, {0, 2, 6, 4, 2}, {0, 0, 3, 5, 6}, {0, 3, 9, 2, 0}, {2, 2, 8, 1, 1},
      {7, 7, 0, 0, 0},  {3, 2, 6, 3, 0}, {2, 5, 3, 2, 2}, {6, 5, 2, 1, 0}, {0, 2, 2, 3, 7}};
  const double k = fleiss_kappa(fleiss);
  o.check(std::abs(k - 0.21) <= 0.005, "Fleiss example kappa " + fmt("%.5f", k) + " vs 0.21 within 0.005");

  const std::vector<std::vector<std::vector<int>>> perfect = {
      {{5, 0}, {0, 5}, {5, 0}, {0, 5}},
      {{5, 0}, {5, 0}, {5, 0}},
      {{0, 14, 0}, {14, 0, 0}, {0, 0, 14}, {0, 14, 0}}};
  bool all_one = true;
  for (const auto& m : perfect) all_one = all_one && fleiss_kappa(m) == 1.0;
  o.check(all_one, "perfect-agreement matrices give kappa == 1.0 exactly");
  return o;
}

// 3 ------------------------------------------------------------------------

struct ExpectedPattern {
  const char* text;
  int generation;
  bool generalized;
};

// Every pattern the seeds can reach on the corpus below, worked out by hand:
//   i agree completely ........ "i [*] agree" realized
//   i realize completely ...... "i [*] completely" kept by rule (i) (realize)
//   you are so right .......... "you [*] are [*] right" realized
//   you were so/quite right ... the seed itself generalized, "you [*] right" (ii)
//   i agree with, i agree with you, then "i [*] with you" -> i side with you (ii)
//   you are absolutely right (there) realized; "you [*] right" also finds the
//     4- and 5-gram of "you seem absolutely right to me" (ii)
//   i agree wholeheartedly, then "i [*] wholeheartedly" -> i like it wholeheartedly (i)
//   i agree with that (point) realized; "i [*] with ..." finds the "i think with"
//     n-grams (i); only in the next round "i think [*] that" drops the "with"
//     every first-round template needs and reaches "i think about that (point)"
// Decoys: rule failures (understand, side with them, said it), negation inside
// a gap (do not agree, are not right) and spans sharing nothing with the seeds.
const std::vector<ExpectedPattern> kReachable = {
    {"i agree", 0, false},
    {"you are right", 0, false},
    {"i agree completely", 1, false},
    {"i realize completely", 1, true},
    {"you are so right", 1, false},
    {"you were so right", 1, true},
    {"you were quite right", 1, true},
    {"i agree with", 1, false},
    {"i agree with you", 1, false},
    {"i side with you", 1, true},
    {"you are absolutely right", 1, false},
    {"you are absolutely right there", 1, false},
    {"you seem absolutely right", 1, true},
    {"you seem absolutely right to", 1, true},
    {"i agree wholeheartedly", 1, false},
    {"i like it wholeheartedly", 1, true},
    {"i agree with that", 1, false},
    {"i agree with that point", 1, false},
    {"i think with", 1, true},
    {"i think with that", 1, true},
    {"i think with that point", 1, true},
    {"i think about that", 2, true},
    {"i think about that point", 2, true},
};

std::vector<Comment> bootstrap_corpus() {
  const std::vector<std::string> planted = {
      "I agree completely", "I realize completely", "You are so right", "You were so right",
      "You were quite right", "I agree with you", "I side with you", "You are absolutely right there",
      "You seem absolutely right to me", "I agree wholeheartedly", "I like it wholeheartedly",
      "I agree with that point", "I think with that point", "I think about that point"};
  const std::vector<std::string> decoys = {
      "I understand completely", "I side with them", "I said it wholeheartedly", "I really do not agree",
      "You are not right", "That is a fair point", "We concede that much", "The data looks solid"};
  const std::vector<std::string> nouns = {"weather", "budget", "train", "market", "garden", "river"};
  const std::vector<std::string> tails = {"changed a lot", "looked fine", "seemed late", "went up"};

  std::vector<std::string> spans;
  for (const auto& s : planted) spans.push_back(s);
  for (const auto& s : decoys) spans.push_back(s);
  for (std::size_t i = 0; spans.size() < 30; ++i) spans.push_back(planted[i % planted.size()]);
  for (std::size_t i = 0; spans.size() < 60; ++i)
    spans.push_back("The " + nouns[i % nouns.size()] + " " + tails[(i / nouns.size()) % tails.size()]);

  std::vector<Comment> comments;
  Comment op;
  op.id = "op";
  op.thread_id = "t";
  op.author_id = "a0";
  op.text = "Nothing to see here.";
  op.is_original_post = true;
  comments.push_back(op);
  for (std::size_t i = 0; i < spans.size(); ++i) {
    Comment c;
    c.id = "c" + std::to_string(i);
    c.thread_id = "t";
    c.parent_id = "op";
    c.author_id = "a" + std::to_string(i + 1);
    c.text = spans[i] + ", but it is complicated.";
    comments.push_back(c);
  }
  return comments;
}

Outcome bootstrap_fixpoint() {
  Outcome o;
  const auto comments = bootstrap_corpus();
  const auto instances = extract_marker_instances(comments);
  o.check(instances.size() == 60, std::to_string(instances.size()) + " marker sentences (60 expected)");
  std::vector<ConcedingSpan> spans;
  for (const auto& inst : instances) spans.push_back(conceding_span(inst));

  LexiconSet lex;
  const auto seeds = default_seeds();
  const auto r = bootstrap(spans, seeds, lex);

  std::map<std::string, std::pair<int, bool>> got, want;
  for (std::size_t i = 0; i < r.patterns.size(); ++i)
    got[r.patterns[i].text()] = {r.patterns[i].generation, r.generalized[i]};
  for (const auto& e : kReachable) want[e.text] = {e.generation, e.generalized};
  std::string extra, missing;
  for (const auto& [t, v] : got)
    if (!want.count(t)) extra += " '" + t + "'";
  for (const auto& [t, v] : want)
    if (!got.count(t)) missing += " '" + t + "'";
  o.check(extra.empty() && missing.empty(),
          "discovered set equals the hand-enumerated oracle (" + std::to_string(got.size()) + " patterns)" +
              (extra.empty() ? "" : "; unexpected:" + extra) + (missing.empty() ? "" : "; missing:" + missing));
  std::string differing;
  for (const auto& [t, v] : got)
    if (want.count(t) && want.at(t) != v)
      differing += " '" + t + "' generation " + std::to_string(v.first) + (v.second ? " generalized" : " realized");
  o.check(got == want, "generations and generalization flags match the oracle" +
                           (differing.empty() ? std::string() : ";" + differing));
  o.check(r.iterations == 3 && r.iterations <= 5,
          "terminated after " + std::to_string(r.iterations) + " iterations (oracle 3, limit 5)");

  bool invariant = true;
  std::ostringstream reference;
  write_patterns(reference, r.patterns);
  for (std::uint64_t s = 1; s <= 10; ++s) {
    auto shuffled = spans;
    std::mt19937_64 rng(s);
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const auto again = bootstrap(shuffled, seeds, lex);
    std::ostringstream text;
    write_patterns(text, again.patterns);
    invariant = invariant && text.str() == reference.str() && again.generalized == r.generalized &&
                again.iterations == r.iterations;
  }
  o.check(invariant, "output identical under 10 shuffles of the input");
  return o;
}

// Shared synthetic pipeline --------------------------------------------------

struct Prepared {
  std::vector<PreparedInstance> train, dev, test, unlabeled;
  std::vector<Label> train_y, dev_y, test_y;
  std::size_t features = 0;
};

Prepared prepare_synthetic(const synthetic::Params& prm, std::size_t n_train, std::size_t n_dev,
                           std::size_t n_test, std::size_t n_unlabeled) {
  const auto corp = synthetic::generate(prm);
  const auto inst = extract_marker_instances(corp.comments);
  std::vector<std::size_t> idx(inst.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(prm.seed + 100);
  std::shuffle(idx.begin(), idx.end(), rng);

  std::vector<MarkerInstance> tr, dv, te, un;
  Prepared p;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const auto i = idx[k];
    if (k < n_train) {
      tr.push_back(inst[i]);
      p.train_y.push_back(corp.labels[i]);
    } else if (k < n_train + n_dev) {
      dv.push_back(inst[i]);
      p.dev_y.push_back(corp.labels[i]);
    } else if (k < n_train + n_dev + n_test) {
      te.push_back(inst[i]);
      p.test_y.push_back(corp.labels[i]);
    } else if (un.size() < n_unlabeled) {
      un.push_back(inst[i]);
    }
  }
  std::vector<LexicalPattern> patterns;
  for (const auto& s : synthetic::curated_phrases()) patterns.push_back(LexicalPattern::parse(s));
  LexiconSet lex;
  const auto op = op_sentences_by_thread(corp.comments);
  const auto fitted = fit_features(tr, p.train_y, lex, patterns, op, FeatureConfig{});
  Featurizer fz(fitted.selected, lex, patterns, op, true);
  p.train = fz.prepare_all(tr);
  p.dev = fz.prepare_all(dv);
  p.test = fz.prepare_all(te);
  p.unlabeled = fz.prepare_all(un);
  p.features = fitted.selected.size();
  return p;
}

// 4 ------------------------------------------------------------------------

Outcome selftrain_bookkeeping() {
  Outcome o;
  synthetic::Params prm;
  prm.threads = 70;
  prm.seed = 2;
  const auto p = prepare_synthetic(prm, 100, 300, 0, 1000);
  o.check(p.unlabeled.size() == 1000, std::to_string(p.unlabeled.size()) + " unlabeled instances");

  SvmConfig svm;
  svm.c = 10.0;
  svm = resolve_gamma(svm, p.features);
  SelfTrainConfig st;
  st.pool_size = 100;
  st.g_c = 20;
  st.seed = 7;
  const auto run = self_train(p.train, p.train_y, p.unlabeled, p.dev, p.dev_y, svm, st);

  long l_c = 0;
  for (auto y : p.train_y) l_c += y == Label::ArgC;
  const long l_o = static_cast<long>(p.train_y.size()) - l_c;
  const double ratio = static_cast<double>(l_o) / static_cast<double>(l_c);

  bool ratio_ok = true, cap_ok = true, disjoint_ok = true, count_ok = true;
  std::set<std::size_t> in_pools, in_added;
  long cum_c = 0, cum_o = 0;
  for (const auto& r : run.rounds) {
    cum_c += r.added_arg_c;
    cum_o += r.added_other;
    ratio_ok = ratio_ok && std::abs(r.added_other - ratio * r.added_arg_c) <= 1.0 + 1e-9 &&
               std::abs(cum_o - ratio * cum_c) <= 1.0 + 1e-9;
    cap_ok = cap_ok && r.added_arg_c <= st.g_c && r.added.size() <= r.pool.size() &&
             r.pool.size() <= static_cast<std::size_t>(st.pool_size);
    const std::set<std::size_t> pool(r.pool.begin(), r.pool.end());
    for (auto i : r.pool) disjoint_ok = disjoint_ok && in_pools.insert(i).second;
    for (auto i : r.added) disjoint_ok = disjoint_ok && pool.count(i) && in_added.insert(i).second;
    count_ok = count_ok && r.added.size() == static_cast<std::size_t>(r.added_arg_c + r.added_other) &&
               r.train_arg_c == l_c + cum_c && r.train_other == l_o + cum_o;
  }
  o.check(run.rounds.size() == 10, std::to_string(run.rounds.size()) + " rounds (10 pools of 100)");
  o.check(cum_c > 0, std::to_string(cum_c) + " arg_c and " + std::to_string(cum_o) + " other instances added");
  o.check(ratio_ok, "per-round and cumulative other/arg_c additions within +-1 of the seed ratio " + fmt("%.3f", ratio));
  o.check(cap_ok, "at most G_c arg_c additions per pool, additions drawn from the pool");
  o.check(disjoint_ok && in_pools.size() == p.unlabeled.size(), "pools partition U; nothing added twice");
  o.check(count_ok, "training-set sizes follow the additions");

  std::ostringstream a, b;
  write_history_jsonl(a, run, p.unlabeled);
  const auto again = self_train(p.train, p.train_y, p.unlabeled, p.dev, p.dev_y, svm, st);
  write_history_jsonl(b, again, p.unlabeled);
  o.check(a.str() == b.str() && run.best_model.dual_coeffs == again.best_model.dual_coeffs &&
              run.best_model.bias == again.best_model.bias,
          "identical seeds give bit-identical histories and models");
  return o;
}

// 5 ------------------------------------------------------------------------

Outcome end_to_end() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  synthetic::Params prm;  // 100 threads x 20 replies = 2000 instances
  const auto p = prepare_synthetic(prm, 60, 300, 300, 2000);
  o.note(std::to_string(p.train.size()) + " train / " + std::to_string(p.dev.size()) + " dev / " +
         std::to_string(p.test.size()) + " test / " + std::to_string(p.unlabeled.size()) + " unlabeled, " +
         std::to_string(p.features) + " features");

  SvmConfig svm;
  svm.c = 10.0;
  svm = resolve_gamma(svm, p.features);
  SelfTrainConfig st;
  st.pool_size = 100;
  st.g_c = 20;
  st.seed = 5;
  const auto run = self_train(p.train, p.train_y, p.unlabeled, p.dev, p.dev_y, svm, st);
  std::vector<Label> predicted;
  for (const auto& x : p.test) predicted.push_back(combine(x.pattern_match, decision(run.best_model, x.x)));
  const auto test = prf(predicted, p.test_y);
  const double gain = run.best().dev_combined.f1 - run.baseline.dev_combined.f1;
  const double secs = seconds_since(t0);
  o.check(test.f1 >= 0.90, "combined test F1 " + fmt("%.4f", test.f1) + " >= 0.90");
  o.check(gain >= 0.02, "dev F1 gain from self-training " + fmt("%.4f", run.baseline.dev_combined.f1) + " -> " +
                            fmt("%.4f", run.best().dev_combined.f1) + " (>= 0.02)");
  o.check(secs < 600.0, "runtime " + fmt("%.1f", secs) + " s < 600 s");
  return o;
}

// 6 ------------------------------------------------------------------------

std::map<std::string, std::pair<long, long>> table1() {
  return {{"admit", {26, 17}},        {"albeit", {9, 17}},           {"although", {78, 93}},
          {"but", {4403, 5908}},      {"concede", {8, 13}},          {"despite", {89, 114}},
          {"even if", {255, 314}},    {"even though", {101, 129}},   {"even when", {31, 55}},
          {"however", {132, 213}},    {"in spite of", {10, 8}},      {"nevertheless", {3, 10}},
          {"notwithstanding", {1, 4}}, {"non the less", {0, 0}},     {"nonetheless", {7, 18}},
          {"the fact remains that", {3, 4}}, {"though", {426, 619}}, {"whereas", {48, 73}},
          {"while", {575, 763}}};
}

std::map<std::string, Label> read_label_tsv(const fs::path& path) {
  std::map<std::string, Label> out;
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) continue;
    if (auto l = parse_label(line.substr(tab + 1))) out[line.substr(0, tab)] = *l;
  }
  return out;
}

Outcome cmv_reproduction() {
  Outcome o;
  const char* dir_env = std::getenv("CONCEDE_CMV_DIR");
  if (!dir_env || !*dir_env) {
    o.status = Outcome::Skip;
    o.note("CONCEDE_CMV_DIR not set; the original corpus and annotations are not available");
    return o;
  }
  const fs::path dir(dir_env);
  std::vector<Comment> comments;
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.path().extension() == ".jsonl") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    auto part = ingest(f);
    comments.insert(comments.end(), part.begin(), part.end());
  }
  o.check(!comments.empty(), std::to_string(comments.size()) + " comments from " + std::to_string(files.size()) + " files");

  const auto want = table1();
  std::string mismatches;
  for (const auto& row : marker_census(comments)) {
    auto it = want.find(row.marker);
    if (it == want.end() || it->second != std::make_pair(row.count_delta, row.count_no_delta))
      mismatches += " " + row.marker + "=" + std::to_string(row.count_delta) + "/" + std::to_string(row.count_no_delta);
  }
  o.check(mismatches.empty(), "census matches the published marker table for all 19 markers" +
                                  (mismatches.empty() ? std::string() : ";" + mismatches));

  const auto instances = extract_marker_instances(comments);
  std::map<std::string, bool> delta_of;
  for (const auto& i : instances) delta_of[i.id] = i.delta_awarded;
  auto totals = [&](const fs::path& labels, long want_d, long want_n, const std::string& name) {
    if (!fs::exists(labels)) {
      o.check(false, name + ": " + labels.string() + " missing");
      return;
    }
    long d = 0, n = 0;
    for (const auto& [id, l] : read_label_tsv(labels)) {
      auto it = delta_of.find(id);
      if (l != Label::ArgC || it == delta_of.end()) continue;
      (it->second ? d : n) += 1;
    }
    o.check(d == want_d && n == want_n, name + " arg_c totals " + std::to_string(d) + "/" + std::to_string(n) +
                                            " vs " + std::to_string(want_d) + "/" + std::to_string(want_n));
  };
  totals(dir / "expert_labels.tsv", 99, 130, "expert set");
  totals(dir / "test_labels.tsv", 85, 83, "test set");

  const fs::path config = dir / "config.json";
  if (!fs::exists(config)) {
    o.check(false, "self-training grid: " + config.string() + " missing");
    return o;
  }
  const fs::path out = fs::absolute("cmv_reproduction");
  for (const char* step : {"ingest", "extract", "train", "selftrain"}) {
    std::vector<std::string> args = {"concede", "--config", config.string(), "--out", out.string(), step};
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream so, se;
    if (run_cli(static_cast<int>(argv.size()), argv.data(), so, se) != kExitOk) {
      o.check(false, std::string("concede ") + step + " failed: " + se.str());
      return o;
    }
  }
  std::ifstream grid(out / "selftrain_grid.tsv");
  std::string line;
  bool found = false;
  while (std::getline(grid, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("pool_size", 0) == 0) continue;
    std::istringstream f(line);
    int pool = 0, gc = 0, tc = 0, to = 0;
    double prec = 0, rec = 0, f1 = 0;
    std::string best;
    f >> pool >> gc >> tc >> to >> prec >> rec >> f1 >> best;
    if (pool != 100 || gc != 50) continue;
    found = true;
    o.check(best == "*", "pool 100 / G_c 50 is the best grid cell");
    o.check(std::abs(f1 - 57.4) <= 3.0, "dev F1 " + fmt("%.1f", f1) + " within 3 points of 57.4");
  }
  if (!found) o.check(false, "grid has no pool 100 / G_c 50 cell");
  return o;
}

// 7 ------------------------------------------------------------------------

bool is_word(const std::string& t) {
  return std::any_of(t.begin(), t.end(), [](unsigned char c) { return std::isalnum(c) || c >= 0x80; });
}

// Word unigrams and adjacent word bigrams of previous sentence + sentence.
std::vector<std::string> oracle_terms(const MarkerInstance& inst) {
  std::string text = inst.sentence;
  if (inst.prev_sentence) text = *inst.prev_sentence + "\n" + inst.sentence;
  const auto toks = tokenize(text).tokens;
  std::vector<std::string> terms;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    if (!is_word(toks[i])) continue;
    terms.push_back(toks[i]);
    if (i + 1 < toks.size() && is_word(toks[i + 1])) terms.push_back(toks[i] + " " + toks[i + 1]);
  }
  return terms;
}

struct OracleTerm {
  std::string name;
  double score;
  double idf;
};

std::vector<OracleTerm> oracle_tfidf(const std::vector<MarkerInstance>& docs, std::size_t k) {
  std::vector<std::vector<std::string>> terms;
  std::set<std::string> all;
  for (const auto& d : docs) {
    terms.push_back(oracle_terms(d));
    all.insert(terms.back().begin(), terms.back().end());
  }
  std::vector<OracleTerm> out;
  const double n = static_cast<double>(docs.size());
  for (const auto& t : all) {
    int df = 0, max_tf = 0;
    for (const auto& doc : terms) {
      const int tf = static_cast<int>(std::count(doc.begin(), doc.end(), t));
      df += tf > 0;
      max_tf = std::max(max_tf, tf);
    }
    out.push_back({t, max_tf * std::log(n / df), std::log(n / df)});
  }
  std::sort(out.begin(), out.end(), [](const OracleTerm& a, const OracleTerm& b) {
    return a.score != b.score ? a.score > b.score : a.name < b.name;
  });
  if (out.size() > k) out.resize(k);
  return out;
}

// Columns ranked by the Pearson statistic of the presence x label table; the
// statistic is compared as an exact fraction N(ad-bc)^2 / margins.
std::vector<std::string> oracle_chi2(const std::vector<FeatureVector>& x, const std::vector<Label>& y,
                                     const Vocabulary& vocab, std::size_t k) {
  struct Col {
    std::string name;
    long long num, den;
  };
  std::vector<Col> cols;
  for (std::uint32_t c = 0; c < vocab.size(); ++c) {
    long long a = 0, b = 0, cc = 0, d = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const bool present = x[i].get(c) > 0.0;
      const bool pos = y[i] == Label::ArgC;
      if (present && pos) ++a;
      else if (present) ++b;
      else if (pos) ++cc;
      else ++d;
    }
    const long long n = a + b + cc + d;
    long long num = n * (a * d - b * cc) * (a * d - b * cc);
    long long den = (a + b) * (cc + d) * (a + cc) * (b + d);
    if (den == 0) num = 0, den = 1;
    cols.push_back({vocab.entries()[c].name, num, den});
  }
  std::sort(cols.begin(), cols.end(), [](const Col& p, const Col& q) {
    const __int128 l = static_cast<__int128>(p.num) * q.den, r = static_cast<__int128>(q.num) * p.den;
    return l != r ? l > r : p.name < q.name;
  });
  std::vector<std::string> names;
  for (std::size_t i = 0; i < cols.size() && i < k; ++i) names.push_back(cols[i].name);
  if (std::find(names.begin(), names.end(), std::string(column::kJaccard)) == names.end())
    names.push_back(std::string(column::kJaccard));
  std::sort(names.begin(), names.end());
  return names;
}

Outcome feature_oracle() {
  Outcome o;
  synthetic::Params prm;
  prm.threads = 5;
  prm.replies_per_thread = 10;
  prm.seed = 11;
  const auto corp = synthetic::generate(prm);
  const auto docs = extract_marker_instances(corp.comments);
  o.check(docs.size() == 50, std::to_string(docs.size()) + " marker sentences (50 expected)");

  bool tfidf_ok = true;
  std::size_t candidates = 0;
  for (int k : {10, 37, 100, 100000}) {
    VocabularyOptions opt;
    opt.k = k;
    const auto vocab = build_vocabulary(docs, opt);
    const auto want = oracle_tfidf(docs, static_cast<std::size_t>(k));
    if (k == 100000) candidates = want.size();
    const auto scores = ngram_scores(docs);
    for (std::size_t i = 0; i < want.size(); ++i) {
      const auto& e = vocab.entries().at(i);
      tfidf_ok = tfidf_ok && e.name == want[i].name && vocab.idf().at(e.name) == want[i].idf &&
                 scores.at(e.name) == want[i].score;
    }
    const auto& next = vocab.entries().at(want.size());
    tfidf_ok = tfidf_ok && vocab.idf().size() == want.size() && next.kind != FeatureKind::Unigram &&
               next.kind != FeatureKind::Bigram;
  }
  o.check(tfidf_ok, "tf-idf top-k (k = 10, 37, 100, all " + std::to_string(candidates) +
                        ") names, idf and scores bit-exact");

  VocabularyOptions all;
  all.k = 100000;
  const auto vocab = build_vocabulary(docs, all);
  std::map<std::string, Label> label_of;
  for (std::size_t i = 0; i < corp.instance_ids.size(); ++i) label_of[corp.instance_ids[i]] = corp.labels[i];
  const auto op = op_sentences_by_thread(corp.comments);
  LexiconSet lex;
  std::vector<FeatureVector> x;
  std::vector<Label> y;
  for (const auto& d : docs) {
    x.push_back(featurize(d, op.at(d.thread_id), vocab, lex));
    y.push_back(label_of.at(d.id));
  }
  bool chi2_ok = true;
  for (int k : {300, 25}) {
    const auto got = chi2_select(x, y, vocab, k);
    std::vector<std::string> names;
    for (auto c : got) names.push_back(vocab.entries()[c].name);
    std::sort(names.begin(), names.end());
    chi2_ok = chi2_ok && names == oracle_chi2(x, y, vocab, static_cast<std::size_t>(k));
  }
  o.check(vocab.size() > 300, std::to_string(vocab.size()) + " columns, so top-300 is a real selection");
  o.check(chi2_ok, "chi-square top-300 and top-25 selections equal the oracle");

  const auto& stop = default_stopwords();
  auto toks = [](const char* s) { return tokenize(s).tokens; };
  const double j1 = jaccard(toks("The dress is gorgeous"), toks("the dress is gorgeous"), stop);
  const double j0 = jaccard(toks("cats purr"), toks("dogs bark"), stop);
  const double jq = jaccard(toks("the dress is gorgeous and expensive"), toks("the dress is cheap"), stop);
  o.check(j1 == 1.0 && j0 == 0.0 && jq == 0.25,
          "jaccard cases 1.0 / 0.0 / 0.25 exact (got " + fmt("%.17g", j1) + ", " + fmt("%.17g", j0) + ", " +
              fmt("%.17g", jq) + ")");
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"1 smo-oracle-equivalence", smo_oracle},
      {"2 statistics-exactness", statistics},
      {"3 bootstrap-fixpoint", bootstrap_fixpoint},
      {"4 selftrain-bookkeeping", selftrain_bookkeeping},
      {"5 synthetic-end-to-end", end_to_end},
      {"6 cmv-reproduction", cmv_reproduction},
      {"7 feature-pipeline-oracle", feature_oracle},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.check(false, std::string("exception: ") + e.what());
    }
    const char* tag = o.status == Outcome::Pass ? "PASS" : o.status == Outcome::Fail ? "FAIL" : "SKIP";
    std::printf("%s  %s  (%.1f s)\n", tag, c.name, seconds_since(t0));
    for (const auto& n : o.notes) std::printf("        %s\n", n.c_str());
    std::fflush(stdout);
    failed += o.status == Outcome::Fail;
  }
  std::printf("%d criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
