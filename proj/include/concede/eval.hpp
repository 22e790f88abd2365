#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "concede/types.hpp"

namespace concede {

/// Votes for (arg_c, other) from the raters of one item.
struct VoteRow {
  int arg_c = 0;
  int other = 0;
};

struct VoteResult {
  Label label = Label::Other;
  int margin = 0;
  bool adjudicated = false;  // the expert label decided a 3-2 split
};

/// Majority over five votes; on a 3-2 split an expert label, when given, wins.
/// Throws std::invalid_argument unless the row sums to `raters` (5 by default).
VoteResult majority_vote(const VoteRow& row, std::optional<Label> expert = std::nullopt,
                         int raters = 5);

/// Fleiss' kappa for an items x categories count matrix with a fixed number of
/// raters per item. 1.0 exactly under perfect agreement. Throws
/// std::invalid_argument on fewer than two rows, uneven row sums, or degenerate
/// marginals without perfect agreement.
double fleiss_kappa(const std::vector<std::vector<int>>& counts);
double fleiss_kappa(std::span<const VoteRow> rows);

struct Confusion {
  long tp = 0, fp = 0, fn = 0, tn = 0;
};

struct EvalReport {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  Confusion confusion;
};

/// Precision/recall/F1 for the positive class; zero when a denominator is zero.
EvalReport prf(std::span<const Label> predictions, std::span<const Label> gold,
               Label positive = Label::ArgC);
EvalReport prf_from_confusion(const Confusion& c);

struct Chi2Result {
  double stat = 0.0;
  double p_value = 1.0;
  int df = 0;
};

/// Regularized upper incomplete gamma Q(a, x).
double gamma_q(double a, double x);
/// P(X > x) for X ~ chi-square with df degrees of freedom.
double chi2_sf(double x, int df);

/// Pearson test of independence on an r x c table (r, c >= 2), no continuity
/// correction. Throws std::invalid_argument when an expected count is zero.
Chi2Result chi2_independence(const std::vector<std::vector<double>>& table);

struct DistributionItem {
  Marker marker = Marker::But;
  bool delta_awarded = false;
  Label label = Label::Other;
  Split split = Split::Unlabeled;
};

struct DistributionRow {
  std::string name;  // marker name or split name
  long arg_c_delta = 0;
  long arg_c_no_delta = 0;
  long other_delta = 0;
  long other_no_delta = 0;
  std::optional<Chi2Result> test;  // per-row test when requested and defined
  std::string notice;
};

struct DistributionReport {
  std::string source;  // "gold" or "predicted"
  std::vector<DistributionRow> markers;
  DistributionRow totals;
  std::vector<DistributionRow> splits;
  std::optional<Chi2Result> test;  // 2x2 label x delta on the totals
  bool significant_at_05 = false;
  std::string notice;
};

/// Counts arg_c (and other) instances by delta outcome per marker and overall,
/// then tests label x delta independence on the totals. A degenerate table skips
/// the test and sets `notice`. Per-marker and per-split tests are optional.
DistributionReport distribution_report(std::span<const DistributionItem> items,
                                       const std::string& source, bool per_row_tests = false);

}  // namespace concede
