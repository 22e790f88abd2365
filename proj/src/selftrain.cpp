#include "concede/selftrain.hpp"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

#include <json.hpp>

#include "concede/parallel.hpp"

namespace concede {

using nlohmann::json;

namespace {

// Fisher-Yates with rejection sampling, so the permutation depends only on the
// mt19937_64 stream and not on the standard library's distributions.
std::vector<std::size_t> shuffled_indices(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    const std::uint64_t bound = i;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t r;
    do r = rng();
    while (r >= limit);
    std::swap(idx[i - 1], idx[static_cast<std::size_t>(r % bound)]);
  }
  return idx;
}

// round(other_l * added_arg_c / arg_c_l), halves rounded up, in integers.
long ratio_target(long other_l, long arg_c_l, long added_arg_c) {
  return (2 * other_l * added_arg_c + arg_c_l) / (2 * arg_c_l);
}

std::vector<double> decisions(const SvmModel& model, std::span<const PreparedInstance> xs,
                              std::span<const std::size_t> which, int jobs) {
  std::vector<double> out(which.size());
  parallel_for(which.size(), jobs, [&](std::size_t k) { out[k] = decision(model, xs[which[k]].x); });
  return out;
}

void evaluate_dev(const SvmModel& model, std::span<const PreparedInstance> dev,
                  std::span<const Label> dev_labels, int jobs, RoundRecord& rec) {
  std::vector<std::size_t> all(dev.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  const auto d = decisions(model, dev, all, jobs);
  std::vector<Label> comb(dev.size()), bare(dev.size());
  for (std::size_t i = 0; i < dev.size(); ++i) {
    bare[i] = label_from_decision(d[i]);
    comb[i] = combine(dev[i].pattern_match, d[i]);
  }
  rec.dev_classifier = prf(bare, dev_labels);
  rec.dev_combined = prf(comb, dev_labels);
}

json report_json(const EvalReport& r) {
  return {{"precision", r.precision},    {"recall", r.recall},       {"f1", r.f1},
          {"tp", r.confusion.tp},        {"fp", r.confusion.fp},     {"fn", r.confusion.fn},
          {"tn", r.confusion.tn}};
}

}  // namespace

void SelfTrainConfig::validate() const {
  if (pool_size < 1) throw std::invalid_argument("selftrain: pool_size must be at least 1");
  if (g_c < 1) throw std::invalid_argument("selftrain: g_c must be at least 1");
  for (const auto& [p, g] : grid)
    if (p < 1 || g < 1) throw std::invalid_argument("selftrain: grid cells need pool_size, g_c >= 1");
}

Label combine(bool pattern_match, double decision_value) {
  return pattern_match ? Label::ArgC : label_from_decision(decision_value);
}

SelfTrainRun self_train(std::span<const PreparedInstance> labeled, std::span<const Label> labels,
                        std::span<const PreparedInstance> unlabeled,
                        std::span<const PreparedInstance> dev, std::span<const Label> dev_labels,
                        const SvmConfig& svm_config, const SelfTrainConfig& st_config) {
  st_config.validate();
  if (labeled.size() != labels.size())
    throw std::invalid_argument("selftrain: labeled instances and labels differ in length");
  if (dev.size() != dev_labels.size())
    throw std::invalid_argument("selftrain: dev instances and labels differ in length");
  long arg_c_l = 0;
  for (auto l : labels) arg_c_l += l == Label::ArgC;
  const long other_l = static_cast<long>(labels.size()) - arg_c_l;
  if (arg_c_l == 0 || other_l == 0)
    throw std::invalid_argument("selftrain: the labeled set must contain both classes");

  std::vector<FeatureVector> train_x;
  std::vector<Label> train_y(labels.begin(), labels.end());
  train_x.reserve(labeled.size() + unlabeled.size());
  for (const auto& p : labeled) train_x.push_back(p.x);

  SelfTrainRun run;
  SvmModel model = train(train_x, train_y, svm_config);
  run.baseline.pool_index = -1;
  run.baseline.train_arg_c = static_cast<int>(arg_c_l);
  run.baseline.train_other = static_cast<int>(other_l);
  evaluate_dev(model, dev, dev_labels, st_config.jobs, run.baseline);
  run.best_model = model;
  double best_f1 = run.baseline.dev_combined.f1;

  const auto order = shuffled_indices(unlabeled.size(), st_config.seed);
  const std::size_t pool_size = static_cast<std::size_t>(st_config.pool_size);
  long added_arg_c = 0, added_other = 0;
  for (std::size_t start = 0, p = 0; start < order.size(); start += pool_size, ++p) {
    RoundRecord rec;
    rec.pool_index = static_cast<int>(p);
    rec.pool.assign(order.begin() + static_cast<std::ptrdiff_t>(start),
                    order.begin() + static_cast<std::ptrdiff_t>(std::min(order.size(), start + pool_size)));
    const auto d = decisions(model, unlabeled, rec.pool, st_config.jobs);

    std::vector<std::size_t> pos, neg;  // positions within the pool
    for (std::size_t k = 0; k < d.size(); ++k) (d[k] >= 0.0 ? pos : neg).push_back(k);
    auto by_confidence = [&](std::size_t a, std::size_t b) {
      const double ca = std::abs(d[a]), cb = std::abs(d[b]);
      return ca != cb ? ca > cb : rec.pool[a] < rec.pool[b];
    };
    std::sort(pos.begin(), pos.end(), by_confidence);
    std::sort(neg.begin(), neg.end(), by_confidence);

    long take_pos = std::min<long>(st_config.g_c, static_cast<long>(pos.size()));
    long take_neg = 0;
    for (; take_pos >= 0; --take_pos) {
      take_neg = ratio_target(other_l, arg_c_l, added_arg_c + take_pos) - added_other;
      if (take_neg <= static_cast<long>(neg.size())) break;
    }
    for (long k = 0; k < take_pos; ++k) {
      const std::size_t u = rec.pool[pos[static_cast<std::size_t>(k)]];
      rec.added.push_back(u);
      train_x.push_back(unlabeled[u].x);
      train_y.push_back(Label::ArgC);
    }
    for (long k = 0; k < take_neg; ++k) {
      const std::size_t u = rec.pool[neg[static_cast<std::size_t>(k)]];
      rec.added.push_back(u);
      train_x.push_back(unlabeled[u].x);
      train_y.push_back(Label::Other);
    }
    added_arg_c += take_pos;
    added_other += take_neg;
    rec.added_arg_c = static_cast<int>(take_pos);
    rec.added_other = static_cast<int>(take_neg);
    rec.train_arg_c = static_cast<int>(arg_c_l + added_arg_c);
    rec.train_other = static_cast<int>(other_l + added_other);

    if (take_pos + take_neg > 0) model = train(train_x, train_y, svm_config);
    evaluate_dev(model, dev, dev_labels, st_config.jobs, rec);
    if (rec.dev_combined.f1 > best_f1) {
      best_f1 = rec.dev_combined.f1;
      run.best_round = static_cast<int>(run.rounds.size());
      run.best_model = model;
    }
    run.rounds.push_back(std::move(rec));
  }
  return run;
}

GridResult grid_sweep(std::span<const PreparedInstance> labeled, std::span<const Label> labels,
                      std::span<const PreparedInstance> unlabeled,
                      std::span<const PreparedInstance> dev, std::span<const Label> dev_labels,
                      const SvmConfig& svm_config, const SelfTrainConfig& st_config) {
  if (st_config.grid.empty()) throw std::invalid_argument("grid_sweep: the grid is empty");
  st_config.validate();
  const std::size_t cells = st_config.grid.size();
  GridResult g;
  g.rows.resize(cells);
  g.runs.resize(cells);
  const int outer = std::max(1, std::min<int>(st_config.jobs, static_cast<int>(cells)));
  const int inner = std::max(1, st_config.jobs / outer);
  parallel_for(cells, outer, [&](std::size_t i) {
    SelfTrainConfig cfg = st_config;
    cfg.pool_size = st_config.grid[i].first;
    cfg.g_c = st_config.grid[i].second;
    cfg.jobs = inner;
    g.runs[i] = self_train(labeled, labels, unlabeled, dev, dev_labels, svm_config, cfg);
    const auto& best = g.runs[i].best();
    auto& row = g.rows[i];
    row.pool_size = cfg.pool_size;
    row.g_c = cfg.g_c;
    row.train_arg_c = best.train_arg_c;
    row.train_other = best.train_other;
    row.dev = best.dev_combined;
    row.best_round = g.runs[i].best_round;
  });
  for (std::size_t i = 1; i < cells; ++i)
    if (g.rows[i].dev.f1 > g.rows[g.best_cell].dev.f1) g.best_cell = i;
  g.rows[g.best_cell].best = true;
  return g;
}

void write_history_jsonl(std::ostream& out, const SelfTrainRun& run,
                         std::span<const PreparedInstance> unlabeled) {
  auto emit = [&](const RoundRecord& r, int round) {
    json j;
    j["round"] = round;
    j["pool_index"] = r.pool_index;
    j["pool_size"] = r.pool.size();
    j["added_arg_c"] = r.added_arg_c;
    j["added_other"] = r.added_other;
    j["train_arg_c"] = r.train_arg_c;
    j["train_other"] = r.train_other;
    j["dev_combined"] = report_json(r.dev_combined);
    j["dev_classifier"] = report_json(r.dev_classifier);
    j["best"] = round - 1 == run.best_round;
    json ids = json::array();
    for (auto u : r.added) ids.push_back(unlabeled[u].id);
    j["added_ids"] = std::move(ids);
    out << j.dump() << '\n';
  };
  emit(run.baseline, 0);
  for (std::size_t i = 0; i < run.rounds.size(); ++i) emit(run.rounds[i], static_cast<int>(i) + 1);
}

void write_grid_tsv(std::ostream& out, const GridResult& grid, const std::string& config_hash) {
  out << "# config_hash=" << config_hash << '\n';
  out << "pool_size\tg_c\ttrain_arg_c\ttrain_other\tprecision\trecall\tf1\tbest\n";
  char buf[128];
  for (const auto& r : grid.rows) {
    std::snprintf(buf, sizeof buf, "%d\t%d\t%d\t%d\t%.1f\t%.1f\t%.1f\t%s\n", r.pool_size, r.g_c,
                  r.train_arg_c, r.train_other, 100.0 * r.dev.precision, 100.0 * r.dev.recall,
                  100.0 * r.dev.f1, r.best ? "*" : "");
    out << buf;
  }
}

}  // namespace concede
