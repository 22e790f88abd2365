#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "concede/eval.hpp"
#include "concede/features.hpp"
#include "concede/svm.hpp"

namespace concede {

/// A featurized instance as self-training sees it. `pattern_match` records
/// whether a curated pattern matches the instance's conceding span.
struct PreparedInstance {
  std::string id;
  FeatureVector x;
  bool pattern_match = false;
};

struct SelfTrainConfig {
  int pool_size = 100;
  int g_c = 50;
  std::uint64_t seed = 0;
  std::vector<std::pair<int, int>> grid;  // (pool_size, g_c) cells for grid_sweep
  int jobs = 1;

  void validate() const;
};

struct RoundRecord {
  int pool_index = 0;
  int added_arg_c = 0;
  int added_other = 0;
  int train_arg_c = 0;
  int train_other = 0;
  EvalReport dev_combined;
  EvalReport dev_classifier;
  std::vector<std::size_t> pool;   // indices into U
  std::vector<std::size_t> added;  // indices into U, in the order added
};

struct SelfTrainRun {
  RoundRecord baseline;            // the model trained on L alone
  std::vector<RoundRecord> rounds;
  int best_round = -1;             // -1 = baseline, otherwise index into rounds
  SvmModel best_model;

  const RoundRecord& best() const {
    return best_round < 0 ? baseline : rounds[static_cast<std::size_t>(best_round)];
  }
};

/// arg_c when the pattern matched, otherwise the sign of the decision value.
Label combine(bool pattern_match, double decision_value);

/// Pool-based self-training. U is shuffled with the seed and cut into pools of
/// pool_size. Each pool is labeled by the current model; the g_c most confident
/// arg_c predictions are added, together with enough confident other predictions
/// to keep the cumulative added set at the original class ratio of L (rounded).
/// The model is retrained after each pool and scored on dev. The best round is
/// the one with the highest dev F1 of the combined system, earliest on ties.
SelfTrainRun self_train(std::span<const PreparedInstance> labeled, std::span<const Label> labels,
                        std::span<const PreparedInstance> unlabeled,
                        std::span<const PreparedInstance> dev, std::span<const Label> dev_labels,
                        const SvmConfig& svm_config, const SelfTrainConfig& st_config);

struct GridRow {
  int pool_size = 0;
  int g_c = 0;
  int train_arg_c = 0;
  int train_other = 0;
  EvalReport dev;  // combined system at the best round
  int best_round = -1;
  bool best = false;
};

struct GridResult {
  std::vector<GridRow> rows;
  std::vector<SelfTrainRun> runs;  // parallel to rows
  std::size_t best_cell = 0;
};

/// One self_train run per grid cell; cells may run concurrently (st_config.jobs).
GridResult grid_sweep(std::span<const PreparedInstance> labeled, std::span<const Label> labels,
                      std::span<const PreparedInstance> unlabeled,
                      std::span<const PreparedInstance> dev, std::span<const Label> dev_labels,
                      const SvmConfig& svm_config, const SelfTrainConfig& st_config);

/// One JSON object per line: the baseline first, then every round.
void write_history_jsonl(std::ostream& out, const SelfTrainRun& run,
                         std::span<const PreparedInstance> unlabeled);
/// Aligned TSV: pool size, G_c, optimal training size, P, R, F1, best flag.
void write_grid_tsv(std::ostream& out, const GridResult& grid, const std::string& config_hash);

}  // namespace concede
