#include "concede/eval.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace concede {

VoteResult majority_vote(const VoteRow& row, std::optional<Label> expert, int raters) {
  if (row.arg_c < 0 || row.other < 0 || row.arg_c + row.other != raters)
    throw std::invalid_argument("vote row (" + std::to_string(row.arg_c) + ", " +
                                std::to_string(row.other) + ") does not sum to " +
                                std::to_string(raters));
  VoteResult r;
  r.label = row.arg_c > row.other ? Label::ArgC : Label::Other;
  r.margin = std::abs(row.arg_c - row.other);
  if (r.margin == 1 && expert) {
    r.label = *expert;
    r.adjudicated = true;
  }
  return r;
}

double fleiss_kappa(const std::vector<std::vector<int>>& counts) {
  if (counts.size() < 2) throw std::invalid_argument("fleiss_kappa needs at least two items");
  const std::size_t k = counts.front().size();
  if (k < 2) throw std::invalid_argument("fleiss_kappa needs at least two categories");
  long n = -1;
  for (const auto& row : counts) {
    if (row.size() != k) throw std::invalid_argument("fleiss_kappa: ragged count matrix");
    long s = 0;
    for (int v : row) {
      if (v < 0) throw std::invalid_argument("fleiss_kappa: negative count");
      s += v;
    }
    if (n < 0) n = s;
    if (s != n) throw std::invalid_argument("fleiss_kappa: rows must have the same number of raters");
  }
  if (n < 2) throw std::invalid_argument("fleiss_kappa needs at least two raters per item");

  const double items = static_cast<double>(counts.size());
  const double nd = static_cast<double>(n);
  std::vector<double> col(k, 0.0);
  double p_bar = 0.0;
  bool perfect = true;
  for (const auto& row : counts) {
    double agree = 0.0;
    int nonzero = 0;
    for (std::size_t j = 0; j < k; ++j) {
      agree += static_cast<double>(row[j]) * (row[j] - 1);
      col[j] += row[j];
      nonzero += row[j] > 0;
    }
    perfect = perfect && nonzero == 1;
    p_bar += agree / (nd * (nd - 1.0));
  }
  p_bar /= items;
  if (perfect) return 1.0;
  double p_e = 0.0;
  for (double c : col) {
    const double p = c / (items * nd);
    p_e += p * p;
  }
  if (p_e >= 1.0) throw std::invalid_argument("fleiss_kappa: degenerate marginals");
  return (p_bar - p_e) / (1.0 - p_e);
}

double fleiss_kappa(std::span<const VoteRow> rows) {
  std::vector<std::vector<int>> counts;
  counts.reserve(rows.size());
  for (const auto& r : rows) counts.push_back({r.arg_c, r.other});
  return fleiss_kappa(counts);
}

EvalReport prf_from_confusion(const Confusion& c) {
  EvalReport r;
  r.confusion = c;
  r.precision = c.tp + c.fp > 0 ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp) : 0.0;
  r.recall = c.tp + c.fn > 0 ? static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn) : 0.0;
  r.f1 = r.precision + r.recall > 0.0
             ? 2.0 * r.precision * r.recall / (r.precision + r.recall)
             : 0.0;
  return r;
}

EvalReport prf(std::span<const Label> predictions, std::span<const Label> gold, Label positive) {
  if (predictions.size() != gold.size())
    throw std::invalid_argument("prf: predictions and gold differ in length");
  Confusion c;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const bool p = predictions[i] == positive, g = gold[i] == positive;
    if (p && g) ++c.tp;
    else if (p) ++c.fp;
    else if (g) ++c.fn;
    else ++c.tn;
  }
  return prf_from_confusion(c);
}

namespace {

double gamma_p_series(double a, double x) {
  double sum = 1.0 / a, term = sum, ap = a;
  for (int n = 0; n < 10000; ++n) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Lentz's continued fraction for Q(a, x), valid for x > a + 1.
double gamma_q_fraction(double a, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a, c = 1.0 / tiny, d = 1.0 / b, h = d;
  for (int i = 1; i < 10000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double gamma_q(double a, double x) {
  if (!(a > 0.0)) throw std::invalid_argument("gamma_q: a must be positive");
  if (x < 0.0) throw std::invalid_argument("gamma_q: x must be non-negative");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_fraction(a, x);
}

double chi2_sf(double x, int df) {
  if (df < 1) throw std::invalid_argument("chi2_sf: df must be at least 1");
  if (x <= 0.0) return 1.0;
  return gamma_q(df / 2.0, x / 2.0);
}

Chi2Result chi2_independence(const std::vector<std::vector<double>>& table) {
  const std::size_t r = table.size();
  if (r < 2) throw std::invalid_argument("chi2_independence needs at least two rows");
  const std::size_t c = table.front().size();
  if (c < 2) throw std::invalid_argument("chi2_independence needs at least two columns");
  std::vector<double> rows(r, 0.0), cols(c, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < r; ++i) {
    if (table[i].size() != c) throw std::invalid_argument("chi2_independence: ragged table");
    for (std::size_t j = 0; j < c; ++j) {
      if (table[i][j] < 0.0) throw std::invalid_argument("chi2_independence: negative count");
      rows[i] += table[i][j];
      cols[j] += table[i][j];
      total += table[i][j];
    }
  }
  for (std::size_t i = 0; i < r; ++i)
    if (rows[i] == 0.0)
      throw std::invalid_argument("chi2_independence: row " + std::to_string(i) +
                                  " has zero expected counts; pool or drop it");
  for (std::size_t j = 0; j < c; ++j)
    if (cols[j] == 0.0)
      throw std::invalid_argument("chi2_independence: column " + std::to_string(j) +
                                  " has zero expected counts; pool or drop it");
  Chi2Result res;
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < c; ++j) {
      const double e = rows[i] * cols[j] / total;
      const double diff = table[i][j] - e;
      res.stat += diff * diff / e;
    }
  }
  res.df = static_cast<int>((r - 1) * (c - 1));
  res.p_value = chi2_sf(res.stat, res.df);
  return res;
}

namespace {

void count(DistributionRow& row, const DistributionItem& it) {
  if (it.label == Label::ArgC)
    (it.delta_awarded ? row.arg_c_delta : row.arg_c_no_delta) += 1;
  else
    (it.delta_awarded ? row.other_delta : row.other_no_delta) += 1;
}

void test_row(DistributionRow& row) {
  const double t[2][2] = {{static_cast<double>(row.arg_c_delta), static_cast<double>(row.arg_c_no_delta)},
                          {static_cast<double>(row.other_delta), static_cast<double>(row.other_no_delta)}};
  const bool degenerate = t[0][0] + t[0][1] == 0 || t[1][0] + t[1][1] == 0 ||
                          t[0][0] + t[1][0] == 0 || t[0][1] + t[1][1] == 0;
  if (degenerate) {
    row.notice = "chi-square skipped: a row or column of the label x delta table is empty";
    return;
  }
  row.test = chi2_independence({{t[0][0], t[0][1]}, {t[1][0], t[1][1]}});
}

}  // namespace

DistributionReport distribution_report(std::span<const DistributionItem> items,
                                       const std::string& source, bool per_row_tests) {
  DistributionReport rep;
  rep.source = source;
  for (auto m : kAllMarkers) {
    DistributionRow row;
    row.name = std::string(to_string(m));
    rep.markers.push_back(std::move(row));
  }
  rep.totals.name = "total";
  std::map<Split, DistributionRow> splits;
  for (const auto& it : items) {
    count(rep.markers[static_cast<std::size_t>(it.marker)], it);
    count(rep.totals, it);
    auto& s = splits[it.split];
    s.name = std::string(to_string(it.split));
    count(s, it);
  }
  for (auto& [k, row] : splits) rep.splits.push_back(std::move(row));

  test_row(rep.totals);
  rep.test = rep.totals.test;
  rep.notice = rep.totals.notice;
  rep.totals.test.reset();
  rep.totals.notice.clear();
  if (rep.test) rep.significant_at_05 = rep.test->p_value < 0.05;
  if (per_row_tests) {
    for (auto& row : rep.markers) test_row(row);
    for (auto& row : rep.splits) test_row(row);
  }
  return rep;
}

}  // namespace concede
