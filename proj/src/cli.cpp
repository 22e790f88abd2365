#include "concede/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "concede/config.hpp"
#include "concede/corpus.hpp"
#include "concede/detector.hpp"
#include "concede/digest.hpp"
#include "concede/eval.hpp"
#include "concede/parallel.hpp"
#include "concede/patterns.hpp"
#include "concede/selftrain.hpp"
#include "concede/serialize.hpp"
#include "concede/svm.hpp"

namespace concede {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr Split kSplits[] = {Split::Train, Split::Dev, Split::Test, Split::Unlabeled};

class MissingArtifact : public DataError {
 public:
  MissingArtifact(const fs::path& path, const std::string& producer)
      : DataError("missing " + path.string() + "; run `concede " + producer + "` first") {}
};

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

void write_text(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw DataError("cannot write " + tmp.string());
    out << content;
    if (!out) throw DataError("failed writing " + tmp.string());
  }
  fs::rename(tmp, path);
}

void print_table(std::ostream& os, const std::vector<std::string>& header,
                 const std::vector<std::vector<std::string>>& rows) {
  std::vector<std::size_t> w(header.size());
  for (std::size_t i = 0; i < header.size(); ++i) w[i] = header[i].size();
  for (const auto& r : rows)
    for (std::size_t i = 0; i < r.size() && i < w.size(); ++i) w[i] = std::max(w[i], r[i].size());
  auto line = [&](const std::vector<std::string>& r) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      os << r[i];
      if (i + 1 < r.size()) os << std::string(w[i] - r[i].size() + 2, ' ');
    }
    os << '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
}

std::string tsv(const std::string& config_hash, const std::vector<std::string>& header,
                const std::vector<std::vector<std::string>>& rows) {
  std::ostringstream os;
  os << "# config_hash=" << config_hash << '\n';
  auto line = [&](const std::vector<std::string>& r) {
    for (std::size_t i = 0; i < r.size(); ++i) os << (i ? "\t" : "") << r[i];
    os << '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
  return os.str();
}

std::vector<std::vector<std::string>> read_tsv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> cells;
    std::size_t start = 0;
    for (;;) {
      auto tab = line.find('\t', start);
      cells.push_back(line.substr(start, tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    rows.push_back(std::move(cells));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Manifest: one entry per subcommand with the config hash and the digests of its
// inputs and outputs. A subcommand whose entry still matches is skipped.

class Manifest {
 public:
  explicit Manifest(fs::path path) : path_(std::move(path)) {
    if (fs::exists(path_)) doc_ = read_json_file(path_);
    if (!doc_.is_object()) doc_ = json::object();
    doc_["format"] = "manifest-v1";
    if (!doc_.contains("steps")) doc_["steps"] = json::object();
  }

  bool fresh(const std::string& step, const std::string& hash, const json& inputs) const {
    auto it = doc_["steps"].find(step);
    if (it == doc_["steps"].end()) return false;
    if (it->value("config_hash", "") != hash || (*it)["inputs"] != inputs) return false;
    for (const auto& [name, digest] : (*it)["outputs"].items()) {
      const fs::path p = path_.parent_path() / name;
      if (!fs::exists(p) || file_digest(p) != digest.get<std::string>()) return false;
    }
    return true;
  }

  void record(const std::string& step, const std::string& hash, json inputs, json outputs) {
    doc_["config_hash"] = hash;
    doc_["steps"][step] = {{"config_hash", hash}, {"inputs", std::move(inputs)}, {"outputs", std::move(outputs)}};
    write_text(path_, doc_.dump(2) + "\n");
  }

 private:
  fs::path path_;
  json doc_;
};

struct Context {
  RunConfig cfg;
  std::string hash;
  bool force = false;
  std::ostream& out;
  std::ostream& err;

  fs::path artifact(const std::string& name) const { return cfg.output_dir / name; }
};

class Step {
 public:
  Step(Context& ctx, std::string name) : ctx_(ctx), name_(std::move(name)), manifest_(ctx.artifact("manifest.json")) {}

  void input(const fs::path& p) { inputs_[p.string()] = file_digest(p); }
  fs::path upstream(const std::string& name, const std::string& producer) {
    const fs::path p = ctx_.artifact(name);
    if (!fs::exists(p)) throw MissingArtifact(p, producer);
    input(p);
    return p;
  }

  bool skip() const {
    if (ctx_.force || !manifest_.fresh(name_, ctx_.hash, inputs_)) return false;
    ctx_.out << name_ << ": up to date (use --force to re-run)\n";
    return true;
  }

  void write(const std::string& name, const std::string& content) {
    write_text(ctx_.artifact(name), content);
    outputs_[name] = digest_hex(content);
  }
  void write_json(const std::string& name, json j) {
    j["config_hash"] = ctx_.hash;
    write(name, j.dump(2) + "\n");
  }

  void commit() { manifest_.record(name_, ctx_.hash, inputs_, outputs_); }

 private:
  Context& ctx_;
  std::string name_;
  Manifest manifest_;
  json inputs_ = json::object();
  json outputs_ = json::object();
};

std::string comments_name(Split s) { return "comments_" + std::string(to_string(s)) + ".jsonl"; }
std::string instances_name(Split s) { return "instances_" + std::string(to_string(s)) + ".jsonl"; }

std::vector<Comment> read_comments(const fs::path& p) { return ingest(p); }

std::map<std::string, Label> read_labels(const fs::path& path) {
  std::map<std::string, Label> out;
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) throw DataError(path.string() + ": expected id<TAB>label", lineno);
    auto label = parse_label(line.substr(tab + 1));
    if (!label) throw DataError(path.string() + ": unknown label '" + line.substr(tab + 1) + "'", lineno);
    out[line.substr(0, tab)] = *label;
  }
  return out;
}

struct VoteLine {
  std::string id;
  VoteRow row;
  std::optional<Label> expert;
};

std::vector<VoteLine> read_votes(const fs::path& path) {
  std::vector<VoteLine> out;
  std::size_t lineno = 0;
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::string line;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> f;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, '\t')) f.push_back(cell);
    if (f.size() < 3 || f.size() > 4)
      throw DataError(path.string() + ": expected id<TAB>arg_c<TAB>other[<TAB>expert]", lineno);
    VoteLine v;
    v.id = f[0];
    try {
      v.row.arg_c = std::stoi(f[1]);
      v.row.other = std::stoi(f[2]);
    } catch (const std::exception&) {
      throw DataError(path.string() + ": vote counts must be integers", lineno);
    }
    if (f.size() == 4 && !f[3].empty()) {
      v.expert = parse_label(f[3]);
      if (!v.expert) throw DataError(path.string() + ": unknown expert label '" + f[3] + "'", lineno);
    }
    out.push_back(std::move(v));
  }
  return out;
}

OpIndex load_op_index(Step& step, Context& ctx) {
  OpIndex op;
  for (auto s : kSplits) {
    const fs::path p = ctx.artifact(comments_name(s));
    if (!fs::exists(p)) continue;
    step.input(p);
    auto comments = read_comments(p);
    for (auto& [k, v] : op_sentences_by_thread(comments)) op[k] = std::move(v);
  }
  return op;
}

std::vector<LexicalPattern> load_patterns(Step& step, const Context& ctx) {
  if (!ctx.cfg.curated_patterns) return {};
  step.input(*ctx.cfg.curated_patterns);
  return load_curated(*ctx.cfg.curated_patterns);
}

LexiconSet lexicons_for(Step& step, const Context& ctx) {
  if (ctx.cfg.sentiment_lexicon) step.input(*ctx.cfg.sentiment_lexicon);
  if (ctx.cfg.hedges) step.input(*ctx.cfg.hedges);
  return load_lexicons(ctx.cfg);
}

std::pair<std::vector<MarkerInstance>, std::vector<Label>> gold_only(
    const std::vector<MarkerInstance>& all) {
  std::pair<std::vector<MarkerInstance>, std::vector<Label>> out;
  for (const auto& m : all) {
    if (!m.gold_label) continue;
    out.first.push_back(m);
    out.second.push_back(*m.gold_label);
  }
  return out;
}

json report_json(const EvalReport& r) {
  return {{"precision", r.precision}, {"recall", r.recall},   {"f1", r.f1},
          {"tp", r.confusion.tp},     {"fp", r.confusion.fp}, {"fn", r.confusion.fn},
          {"tn", r.confusion.tn}};
}

std::vector<std::string> prf_cells(const std::string& name, const EvalReport& r) {
  return {name, fmt("%.1f", 100 * r.precision), fmt("%.1f", 100 * r.recall), fmt("%.1f", 100 * r.f1)};
}

// ---------------------------------------------------------------------------

int cmd_ingest(Context& ctx) {
  if (ctx.cfg.corpora.empty()) throw ConfigError({"corpus: no corpus paths configured"});
  Step step(ctx, "ingest");
  for (const auto& [s, p] : ctx.cfg.corpora) step.input(p);
  if (step.skip()) return kExitOk;
  json summary = json::object();
  std::vector<std::vector<std::string>> rows;
  for (const auto& [s, p] : ctx.cfg.corpora) {
    auto comments = ingest(p, ctx.cfg.corpus_format);
    std::ostringstream os;
    write_comments_jsonl(os, comments);
    step.write(comments_name(s), os.str());
    std::set<std::string> threads;
    long ops = 0, deltas = 0;
    for (const auto& c : comments) {
      threads.insert(c.thread_id);
      ops += c.is_original_post;
      deltas += c.delta_awarded;
    }
    summary[std::string(to_string(s))] = {{"comments", comments.size()}, {"threads", threads.size()},
                                          {"original_posts", ops}, {"delta_awarded", deltas}};
    rows.push_back({std::string(to_string(s)), std::to_string(comments.size()),
                    std::to_string(threads.size()), std::to_string(ops), std::to_string(deltas)});
  }
  step.write_json("ingest.json", {{"splits", summary}});
  step.commit();
  print_table(ctx.out, {"split", "comments", "threads", "original_posts", "delta"}, rows);
  return kExitOk;
}

int cmd_extract(Context& ctx) {
  Step step(ctx, "extract");
  std::vector<Split> present;
  for (auto s : kSplits)
    if (ctx.cfg.corpora.contains(s)) {
      step.upstream(comments_name(s), "ingest");
      present.push_back(s);
    }
  if (present.empty()) throw MissingArtifact(ctx.artifact("comments_<split>.jsonl"), "ingest");
  for (const auto& [s, p] : ctx.cfg.labels) step.input(p);
  for (const auto& [s, p] : ctx.cfg.votes) step.input(p);
  if (step.skip()) return kExitOk;

  json summary = json::object();
  std::vector<std::vector<std::string>> rows;
  for (auto s : present) {
    auto comments = read_comments(ctx.artifact(comments_name(s)));
    auto inst = extract_marker_instances(comments, kAllMarkers, s);
    std::map<std::string, std::size_t> by_id;
    for (std::size_t i = 0; i < inst.size(); ++i) by_id[inst[i].id] = i;

    long adjudicated = 0;
    if (auto it = ctx.cfg.votes.find(s); it != ctx.cfg.votes.end()) {
      for (const auto& v : read_votes(it->second)) {
        auto pos = by_id.find(v.id);
        if (pos == by_id.end())
          throw DataError(it->second.string() + ": unknown instance id '" + v.id + "'");
        auto& m = inst[pos->second];
        const auto vote = majority_vote(v.row, v.expert);
        adjudicated += vote.adjudicated;
        m.gold_label = vote.label;
        m.crowd_labels.assign(static_cast<std::size_t>(v.row.arg_c), Label::ArgC);
        m.crowd_labels.insert(m.crowd_labels.end(), static_cast<std::size_t>(v.row.other), Label::Other);
      }
    }
    if (auto it = ctx.cfg.labels.find(s); it != ctx.cfg.labels.end()) {
      for (const auto& [id, label] : read_labels(it->second)) {
        auto pos = by_id.find(id);
        if (pos == by_id.end())
          throw DataError(it->second.string() + ": unknown instance id '" + id + "'");
        inst[pos->second].gold_label = label;
      }
    }
    std::ostringstream os;
    write_instances_jsonl(os, inst);
    step.write(instances_name(s), os.str());

    std::map<Marker, long> per_marker;
    long labeled = 0, argc = 0;
    for (const auto& m : inst) {
      ++per_marker[m.marker];
      labeled += m.gold_label.has_value();
      argc += m.gold_label == Label::ArgC;
    }
    json markers = json::object();
    std::vector<std::string> row = {std::string(to_string(s))};
    for (auto m : kAllMarkers) {
      markers[std::string(to_string(m))] = per_marker[m];
      row.push_back(std::to_string(per_marker[m]));
    }
    row.push_back(std::to_string(labeled));
    row.push_back(std::to_string(argc));
    rows.push_back(row);
    summary[std::string(to_string(s))] = {{"instances", inst.size()}, {"markers", markers},
                                          {"labeled", labeled}, {"arg_c", argc},
                                          {"adjudicated", adjudicated}};
  }
  step.write_json("extract.json", {{"splits", summary}});
  step.commit();
  print_table(ctx.out, {"split", "but", "though", "however", "while", "labeled", "arg_c"}, rows);
  return kExitOk;
}

int cmd_census(Context& ctx) {
  Step step(ctx, "census");
  std::vector<Comment> all;
  std::set<std::string> seen;
  for (auto s : kSplits) {
    if (!ctx.cfg.corpora.contains(s)) continue;
    for (auto& c : read_comments(step.upstream(comments_name(s), "ingest")))
      if (seen.insert(c.id).second) all.push_back(std::move(c));
  }
  if (seen.empty() && ctx.cfg.corpora.empty()) throw MissingArtifact(ctx.artifact("comments_<split>.jsonl"), "ingest");
  if (step.skip()) return kExitOk;
  const auto census = marker_census(all);
  std::vector<std::vector<std::string>> rows;
  json j = json::array();
  for (const auto& r : census) {
    rows.push_back({r.marker, std::to_string(r.count_delta), std::to_string(r.count_no_delta)});
    j.push_back({{"marker", r.marker}, {"delta", r.count_delta}, {"no_delta", r.count_no_delta}});
  }
  step.write("census.tsv", tsv(ctx.hash, {"marker", "delta", "no_delta"}, rows));
  step.write_json("census.json", {{"rows", j}});
  step.commit();
  print_table(ctx.out, {"marker", "delta", "no_delta"}, rows);
  return kExitOk;
}

int cmd_bootstrap(Context& ctx) {
  Step step(ctx, "bootstrap");
  std::vector<MarkerInstance> inst;
  for (auto s : {Split::Train, Split::Unlabeled}) {
    if (!ctx.cfg.corpora.contains(s)) continue;
    auto part = read_instances_jsonl(step.upstream(instances_name(s), "extract"));
    inst.insert(inst.end(), part.begin(), part.end());
  }
  if (!ctx.cfg.corpora.contains(Split::Train) && !ctx.cfg.corpora.contains(Split::Unlabeled))
    throw ConfigError({"corpus: bootstrap needs a train or unlabeled corpus"});
  const auto lex = lexicons_for(step, ctx);
  if (step.skip()) return kExitOk;

  std::vector<ConcedingSpan> spans;
  spans.reserve(inst.size());
  for (const auto& m : inst) spans.push_back(conceding_span(m));
  std::vector<LexicalPattern> seeds;
  for (const auto& s : ctx.cfg.seeds) seeds.push_back(LexicalPattern::parse(s, Provenance::Seed));
  BootstrapOptions opts;
  opts.max_iterations = ctx.cfg.bootstrap_max_iterations;

  auto emit = [&](const BootstrapResult& res, bool converged) {
    std::ostringstream pats;
    write_patterns(pats, res.patterns);
    step.write("patterns_bootstrapped.txt", pats.str());
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : pattern_report(res, spans, lex))
      rows.push_back({r.pattern, std::string(to_string(r.provenance)), std::to_string(r.generation),
                      r.generalized ? "yes" : "no", std::to_string(r.span_matches),
                      r.rule_attitude ? "yes" : "no", r.rule_second_person ? "yes" : "no"});
    const std::vector<std::string> header = {"pattern", "provenance", "generation", "generalized",
                                             "span_matches", "attitude_or_sentiment", "second_person"};
    step.write("pattern_report.tsv", tsv(ctx.hash, header, rows));
    step.write_json("bootstrap.json", {{"patterns", res.patterns.size()},
                                       {"iterations", res.iterations},
                                       {"converged", converged},
                                       {"spans", spans.size()}});
    step.commit();
    ctx.out << "bootstrap: " << res.patterns.size() << " patterns after " << res.iterations
            << " iterations" << (converged ? "" : " (iteration cap reached)") << '\n';
  };
  try {
    emit(bootstrap(spans, seeds, lex, opts), true);
  } catch (const BootstrapNonConvergence& e) {
    emit(e.partial(), false);
    throw;
  }
  return kExitOk;
}

struct Prepared {
  std::vector<PreparedInstance> items;
  std::vector<Label> labels;
};

Prepared prepare_gold(const Featurizer& fz, const std::vector<MarkerInstance>& all, int jobs) {
  auto [inst, labels] = gold_only(all);
  return {fz.prepare_all(inst, jobs), std::move(labels)};
}

int cmd_train(Context& ctx) {
  Step step(ctx, "train");
  auto train_all = read_instances_jsonl(step.upstream(instances_name(Split::Train), "extract"));
  auto dev_all = read_instances_jsonl(step.upstream(instances_name(Split::Dev), "extract"));
  const auto op = load_op_index(step, ctx);
  const auto patterns = load_patterns(step, ctx);
  const auto lex = lexicons_for(step, ctx);
  if (step.skip()) return kExitOk;

  auto [train_inst, labels] = gold_only(train_all);
  if (train_inst.empty()) throw DataError("no gold-labeled train instances; configure labels.train or votes.train");
  const int jobs = ctx.cfg.effective_jobs();
  const auto fitted = fit_features(train_inst, labels, lex, patterns, op, ctx.cfg.features, jobs);
  Featurizer fz(fitted.selected, lex, patterns, op, ctx.cfg.features.include_jaccard);
  auto xs = fz.prepare_all(train_inst, jobs);
  std::vector<FeatureVector> vecs;
  for (const auto& p : xs) vecs.push_back(p.x);
  const SvmConfig svm = resolve_gamma(ctx.cfg.svm, fitted.selected.size());

  std::vector<std::vector<std::string>> chi_rows;
  std::vector<std::uint32_t> order(fitted.full.size());
  for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](auto a, auto b) { return fitted.chi2[a] > fitted.chi2[b]; });
  for (auto c : order)
    chi_rows.push_back({fitted.full.entries()[c].name, std::string(to_string(fitted.full.entries()[c].kind)),
                        fmt("%.6f", fitted.chi2[c]),
                        fitted.selected.has(fitted.full.entries()[c].name) ? "yes" : "no"});

  SvmModel model;
  bool converged = true;
  std::string failure;
  try {
    model = train(vecs, labels, svm);
  } catch (const NonConvergenceError& e) {
    model = e.model();
    converged = false;
    failure = e.what();
  }
  const auto dev = prepare_gold(fz, dev_all, jobs);
  std::vector<Label> bare, comb;
  for (const auto& p : dev.items) {
    const double d = decision(model, p.x);
    bare.push_back(label_from_decision(d));
    comb.push_back(combine(p.pattern_match, d));
  }
  const auto r_bare = prf(bare, dev.labels), r_comb = prf(comb, dev.labels);

  step.write_json("vocabulary.json", to_json(fitted.selected));
  step.write("features_chi2.tsv", tsv(ctx.hash, {"feature", "kind", "chi2", "selected"}, chi_rows));
  step.write_json("model_baseline.json", to_json(model));
  step.write_json("train.json", {{"train_instances", train_inst.size()},
                                 {"vocabulary_size", fitted.full.size()},
                                 {"selected_features", fitted.selected.size()},
                                 {"gamma", svm.gamma},
                                 {"support_vectors", model.support_vectors.size()},
                                 {"converged", converged},
                                 {"dev_classifier", report_json(r_bare)},
                                 {"dev_combined", report_json(r_comb)}});
  step.commit();
  print_table(ctx.out, {"system (dev)", "P", "R", "F1"},
              {prf_cells("SVM_noST", r_bare), prf_cells("SVM_noST + patterns", r_comb)});
  if (!converged) throw NonConvergenceError(failure, model);
  return kExitOk;
}

int cmd_selftrain(Context& ctx) {
  Step step(ctx, "selftrain");
  const auto vocab = vocabulary_from_json(read_json_file(step.upstream("vocabulary.json", "train")));
  auto train_all = read_instances_jsonl(step.upstream(instances_name(Split::Train), "extract"));
  auto dev_all = read_instances_jsonl(step.upstream(instances_name(Split::Dev), "extract"));
  std::vector<MarkerInstance> unlabeled;
  if (ctx.cfg.corpora.contains(Split::Unlabeled))
    unlabeled = read_instances_jsonl(step.upstream(instances_name(Split::Unlabeled), "extract"));
  const auto op = load_op_index(step, ctx);
  const auto patterns = load_patterns(step, ctx);
  const auto lex = lexicons_for(step, ctx);
  if (step.skip()) return kExitOk;

  const int jobs = ctx.cfg.effective_jobs();
  Featurizer fz(vocab, lex, patterns, op, ctx.cfg.features.include_jaccard);
  const auto train = prepare_gold(fz, train_all, jobs);
  const auto dev = prepare_gold(fz, dev_all, jobs);
  const auto pool = fz.prepare_all(unlabeled, jobs);
  SelfTrainConfig st = ctx.cfg.selftrain;
  st.jobs = jobs;
  const auto grid = grid_sweep(train.items, train.labels, pool, dev.items, dev.labels,
                               resolve_gamma(ctx.cfg.svm, vocab.size()), st);

  std::ostringstream table, history;
  write_grid_tsv(table, grid, ctx.hash);
  for (std::size_t i = 0; i < grid.runs.size(); ++i) {
    std::ostringstream h;
    write_history_jsonl(h, grid.runs[i], pool);
    std::istringstream lines(h.str());
    std::string line;
    while (std::getline(lines, line)) {
      auto j = json::parse(line);
      j["pool_size"] = grid.rows[i].pool_size;
      j["g_c"] = grid.rows[i].g_c;
      history << j.dump() << '\n';
    }
  }
  step.write("selftrain_grid.tsv", table.str());
  step.write("selftrain_history.jsonl", history.str());
  step.write_json("model_selftrain.json", to_json(grid.runs[grid.best_cell].best_model));
  const auto& best = grid.rows[grid.best_cell];
  step.write_json("selftrain.json", {{"best_pool_size", best.pool_size},
                                     {"best_g_c", best.g_c},
                                     {"best_round", best.best_round},
                                     {"train_arg_c", best.train_arg_c},
                                     {"train_other", best.train_other},
                                     {"baseline_dev_combined", report_json(grid.runs[grid.best_cell].baseline.dev_combined)},
                                     {"dev_combined", report_json(best.dev)}});
  step.commit();
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : grid.rows)
    rows.push_back({std::to_string(r.pool_size), std::to_string(r.g_c),
                    "(" + std::to_string(r.train_arg_c) + ", " + std::to_string(r.train_other) + ")",
                    fmt("%.1f", 100 * r.dev.precision), fmt("%.1f", 100 * r.dev.recall),
                    fmt("%.1f", 100 * r.dev.f1), r.best ? "*" : ""});
  print_table(ctx.out, {"pool_size", "G_c", "optimal size (training)", "P", "R", "F1", "best"}, rows);
  return kExitOk;
}

std::string predictions_tsv(const std::string& hash, const std::vector<MarkerInstance>& inst,
                            const std::vector<PreparedInstance>& prepared, const SvmModel& model) {
  std::vector<std::vector<std::string>> rows;
  for (std::size_t i = 0; i < inst.size(); ++i) {
    const double d = decision(model, prepared[i].x);
    rows.push_back({inst[i].id, std::string(to_string(inst[i].marker)),
                    inst[i].delta_awarded ? "1" : "0", prepared[i].pattern_match ? "1" : "0",
                    fmt("%.17g", d), std::string(to_string(label_from_decision(d))),
                    std::string(to_string(combine(prepared[i].pattern_match, d))),
                    inst[i].gold_label ? std::string(to_string(*inst[i].gold_label)) : ""});
  }
  return tsv(hash, {"instance_id", "marker", "delta_awarded", "pattern_match", "decision", "classifier",
                    "combined", "gold"},
             rows);
}

int cmd_predict(Context& ctx) {
  Step step(ctx, "predict");
  const auto vocab = vocabulary_from_json(read_json_file(step.upstream("vocabulary.json", "train")));
  const std::string model_file = "model_" + ctx.cfg.predict_model + ".json";
  const auto model = model_from_json(read_json_file(step.upstream(model_file, ctx.cfg.predict_model == "baseline" ? "train" : "selftrain")));
  std::vector<MarkerInstance> test;
  if (ctx.cfg.corpora.contains(Split::Test))
    test = read_instances_jsonl(step.upstream(instances_name(Split::Test), "extract"));
  if (ctx.cfg.predict_corpus) step.input(*ctx.cfg.predict_corpus);
  if (test.empty() && !ctx.cfg.predict_corpus)
    throw ConfigError({"corpus.test: nothing to predict (configure corpus.test or predict.corpus)"});
  const auto op = load_op_index(step, ctx);
  const auto patterns = load_patterns(step, ctx);
  const auto lex = lexicons_for(step, ctx);
  if (step.skip()) return kExitOk;
  const int jobs = ctx.cfg.effective_jobs();

  json summary = json::object();
  summary["model"] = ctx.cfg.predict_model;
  if (!test.empty()) {
    Featurizer fz(vocab, lex, patterns, op, ctx.cfg.features.include_jaccard);
    const auto prepared = fz.prepare_all(test, jobs);
    step.write("predictions_test.tsv", predictions_tsv(ctx.hash, test, prepared, model));
    summary["test_instances"] = test.size();
  }
  if (ctx.cfg.predict_corpus) {
    const auto comments = ingest(*ctx.cfg.predict_corpus, ctx.cfg.corpus_format);
    const auto inst = extract_marker_instances(comments);
    Featurizer fz(vocab, lex, patterns, op_sentences_by_thread(comments), ctx.cfg.predict_include_jaccard);
    const auto prepared = fz.prepare_all(inst, jobs);
    step.write("predictions_external.tsv", predictions_tsv(ctx.hash, inst, prepared, model));
    summary["external_instances"] = inst.size();
    summary["external_include_jaccard"] = ctx.cfg.predict_include_jaccard;
  }
  step.write_json("predict.json", summary);
  step.commit();
  ctx.out << "predict: wrote predictions with model_" << ctx.cfg.predict_model << '\n';
  return kExitOk;
}

struct PredictionRow {
  std::string id;
  Marker marker;
  bool delta;
  bool pattern_match;
  Label classifier, combined;
  std::optional<Label> gold;
};

std::vector<PredictionRow> read_predictions(const fs::path& p) {
  auto rows = read_tsv(p);
  if (rows.empty()) throw DataError(p.string() + ": empty predictions file");
  std::vector<PredictionRow> out;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.size() != 8) throw DataError(p.string() + ": expected 8 columns", i + 2);
    PredictionRow x;
    x.id = r[0];
    auto m = parse_marker(r[1]);
    auto c = parse_label(r[5]), k = parse_label(r[6]);
    if (!m || !c || !k) throw DataError(p.string() + ": malformed prediction row", i + 2);
    x.marker = *m;
    x.delta = r[2] == "1";
    x.pattern_match = r[3] == "1";
    x.classifier = *c;
    x.combined = *k;
    if (!r[7].empty()) x.gold = parse_label(r[7]);
    out.push_back(std::move(x));
  }
  return out;
}

int cmd_evaluate(Context& ctx) {
  Step step(ctx, "evaluate");
  const auto preds = read_predictions(step.upstream("predictions_test.tsv", "predict"));
  if (step.skip()) return kExitOk;
  std::vector<Label> gold, pat, svm, comb;
  for (const auto& p : preds) {
    if (!p.gold) continue;
    gold.push_back(*p.gold);
    pat.push_back(p.pattern_match ? Label::ArgC : Label::Other);
    svm.push_back(p.classifier);
    comb.push_back(p.combined);
  }
  if (gold.empty()) throw DataError("test predictions carry no gold labels; configure labels.test or votes.test");
  const auto r_pat = prf(pat, gold), r_svm = prf(svm, gold), r_comb = prf(comb, gold);
  const std::vector<std::vector<std::string>> rows = {
      prf_cells("B_Lexicon_MF (patterns)", r_pat), prf_cells("SVM", r_svm),
      prf_cells("SVM + patterns", r_comb)};
  step.write("evaluation.tsv", tsv(ctx.hash, {"system", "P", "R", "F1"}, rows));
  step.write_json("evaluation.json", {{"instances", gold.size()},
                                      {"patterns", report_json(r_pat)},
                                      {"classifier", report_json(r_svm)},
                                      {"combined", report_json(r_comb)}});
  step.commit();
  print_table(ctx.out, {"system (test)", "P", "R", "F1"}, rows);
  return kExitOk;
}

json distribution_json(const DistributionReport& r) {
  auto row = [](const DistributionRow& x) {
    json j = {{"name", x.name},
              {"arg_c_delta", x.arg_c_delta},
              {"arg_c_no_delta", x.arg_c_no_delta},
              {"other_delta", x.other_delta},
              {"other_no_delta", x.other_no_delta}};
    if (x.test) j["test"] = {{"stat", x.test->stat}, {"p_value", x.test->p_value}, {"df", x.test->df}};
    if (!x.notice.empty()) j["notice"] = x.notice;
    return j;
  };
  json markers = json::array(), splits = json::array();
  for (const auto& m : r.markers) markers.push_back(row(m));
  for (const auto& s : r.splits) splits.push_back(row(s));
  json j = {{"source", r.source}, {"markers", markers}, {"totals", row(r.totals)}, {"splits", splits},
            {"significant_at_05", r.significant_at_05}};
  if (r.test) j["test"] = {{"stat", r.test->stat}, {"p_value", r.test->p_value}, {"df", r.test->df}};
  if (!r.notice.empty()) j["notice"] = r.notice;
  return j;
}

void show_distribution(Context& ctx, Step& step, const DistributionReport& r) {
  std::vector<std::vector<std::string>> rows;
  auto add = [&](const DistributionRow& x) {
    rows.push_back({x.name, std::to_string(x.arg_c_delta), std::to_string(x.arg_c_no_delta),
                    x.test ? fmt("%.4f", x.test->stat) : "", x.test ? fmt("%.4g", x.test->p_value) : ""});
  };
  for (const auto& m : r.markers) add(m);
  add(r.totals);
  if (r.test) {
    rows.back()[3] = fmt("%.4f", r.test->stat);
    rows.back()[4] = fmt("%.4g", r.test->p_value);
  }
  for (const auto& s : r.splits) add(s);
  const std::vector<std::string> header = {"marker", "delta", "no_delta", "chi2", "p"};
  step.write("distribution_" + r.source + ".tsv", tsv(ctx.hash, header, rows));
  ctx.out << "arg_c distribution (" << r.source << ")\n";
  print_table(ctx.out, header, rows);
  if (r.test)
    ctx.out << (r.significant_at_05 ? "significant" : "not significant") << " at p < 0.05\n";
  else
    ctx.out << r.notice << '\n';
}

int cmd_distribution(Context& ctx) {
  Step step(ctx, "distribution");
  std::vector<DistributionItem> gold;
  bool any_split = false;
  for (auto s : {Split::Train, Split::Dev, Split::Test}) {
    if (!ctx.cfg.corpora.contains(s)) continue;
    any_split = true;
    for (const auto& m : read_instances_jsonl(step.upstream(instances_name(s), "extract")))
      if (m.gold_label) gold.push_back({m.marker, m.delta_awarded, *m.gold_label, s});
  }
  if (!any_split) throw ConfigError({"corpus: distribution needs a train, dev or test corpus"});
  std::optional<std::vector<PredictionRow>> predicted;
  if (fs::exists(ctx.artifact("predictions_test.tsv")))
    predicted = read_predictions(step.upstream("predictions_test.tsv", "predict"));
  if (step.skip()) return kExitOk;

  json j = json::object();
  const auto g = distribution_report(gold, "gold", ctx.cfg.distribution_per_row_tests);
  show_distribution(ctx, step, g);
  j["gold"] = distribution_json(g);
  if (predicted) {
    std::vector<DistributionItem> items;
    for (const auto& p : *predicted) items.push_back({p.marker, p.delta, p.combined, Split::Test});
    const auto r = distribution_report(items, "predicted", ctx.cfg.distribution_per_row_tests);
    show_distribution(ctx, step, r);
    j["predicted"] = distribution_json(r);
  } else {
    ctx.out << "no predictions_test.tsv; run `concede predict` for the predicted distribution\n";
  }
  step.write_json("distribution.json", j);
  step.commit();
  return kExitOk;
}

int cmd_agreement(Context& ctx) {
  if (ctx.cfg.votes.empty()) throw ConfigError({"votes: no vote files configured"});
  Step step(ctx, "agreement");
  for (const auto& [s, p] : ctx.cfg.votes) step.input(p);
  if (step.skip()) return kExitOk;
  std::vector<std::vector<std::string>> rows;
  json j = json::object();
  std::vector<VoteRow> all;
  auto summarize = [&](const std::string& name, const std::vector<VoteLine>& votes) {
    std::vector<VoteRow> r;
    long split32 = 0, adjudicated = 0, argc = 0;
    for (const auto& v : votes) {
      r.push_back(v.row);
      const auto res = majority_vote(v.row, v.expert);
      split32 += res.margin == 1;
      adjudicated += res.adjudicated;
      argc += res.label == Label::ArgC;
    }
    const double kappa = fleiss_kappa(r);
    rows.push_back({name, std::to_string(votes.size()), fmt("%.4f", kappa), std::to_string(split32),
                    std::to_string(adjudicated), std::to_string(argc)});
    j[name] = {{"items", votes.size()}, {"fleiss_kappa", kappa}, {"three_two_splits", split32},
               {"adjudicated", adjudicated}, {"arg_c", argc}};
    all.insert(all.end(), r.begin(), r.end());
  };
  std::vector<VoteLine> pooled;
  for (const auto& [s, p] : ctx.cfg.votes) {
    auto votes = read_votes(p);
    summarize(std::string(to_string(s)), votes);
    pooled.insert(pooled.end(), votes.begin(), votes.end());
  }
  if (ctx.cfg.votes.size() > 1) summarize("all", pooled);
  const std::vector<std::string> header = {"split", "items", "fleiss_kappa", "3-2 splits", "adjudicated", "arg_c"};
  step.write("agreement.tsv", tsv(ctx.hash, header, rows));
  step.write_json("agreement.json", j);
  step.commit();
  print_table(ctx.out, header, rows);
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Argumentative concession detection and persuasion analysis"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path;
  bool force = false;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::string out_dir;
  app.add_option("--config", config_path, "JSON run configuration")->required();
  app.add_flag("--force", force, "re-run even when the manifest says the outputs are current");
  app.add_option("--seed", seed, "override the config seed");
  app.add_option("--jobs", jobs, "worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
  app.add_option("--out", out_dir, "override the output directory");

  using Handler = int (*)(Context&);
  const std::vector<std::tuple<const char*, const char*, Handler>> commands = {
      {"ingest", "validate and normalize the comment corpora", cmd_ingest},
      {"extract", "extract marker instances and attach gold labels", cmd_extract},
      {"census", "count the candidate concession markers by delta outcome", cmd_census},
      {"bootstrap", "grow the lexical pattern set from the seeds", cmd_bootstrap},
      {"train", "build features and train the classifier without self-training", cmd_train},
      {"selftrain", "run the self-training grid", cmd_selftrain},
      {"predict", "label the test split (and an optional external corpus)", cmd_predict},
      {"evaluate", "precision, recall and F1 on the test split", cmd_evaluate},
      {"distribution", "arg_c counts by delta outcome with a chi-square test", cmd_distribution},
      {"agreement", "Fleiss kappa and majority votes from crowd labels", cmd_agreement},
  };
  for (const auto& [name, help, fn] : commands) app.add_subcommand(name, help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kExitUsage;
  }

  try {
    RunConfig cfg = load_config(config_path);
    if (seed) cfg.seed = cfg.svm.seed = cfg.selftrain.seed = *seed;
    if (jobs) cfg.jobs = *jobs;
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    check_paths(cfg);
    fs::create_directories(cfg.output_dir);
    Context ctx{cfg, cfg.hash(), force, out, err};
    for (const auto& [name, help, fn] : commands)
      if (app.got_subcommand(name)) return fn(ctx);
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const NonConvergenceError& e) {
    err << "error: " << e.what() << '\n';
    return kExitNonConvergence;
  } catch (const BootstrapNonConvergence& e) {
    err << "error: " << e.what() << '\n';
    return kExitNonConvergence;
  } catch (const DataError& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const VersionMismatchError& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
}

}  // namespace concede
