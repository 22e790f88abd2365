#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "concede/features.hpp"
#include "concede/types.hpp"

namespace concede {

enum class ClassWeightMode { InverseFrequency, Uniform };
std::string_view to_string(ClassWeightMode mode);
std::optional<ClassWeightMode> parse_class_weight_mode(std::string_view s);

struct SvmConfig {
  double c = 1.0;
  /// RBF width. Zero asks the caller to resolve it (see resolve_gamma).
  double gamma = 0.0;
  ClassWeightMode class_weight_mode = ClassWeightMode::InverseFrequency;
  /// KKT tolerance.
  double tolerance = 1e-3;
  /// Full sweeps over the training set before giving up.
  int max_passes = 10;
  std::uint64_t seed = 0;
  /// Kernel rows kept in the LRU cache.
  std::size_t cache_rows = 1024;

  void validate() const;
};

/// gamma = 1 / number of features when config.gamma is 0.
SvmConfig resolve_gamma(SvmConfig config, std::size_t num_features);

struct SvmModel {
  std::vector<FeatureVector> support_vectors;
  std::vector<double> dual_coeffs;  // alpha_i * y_i
  double bias = 0.0;
  SvmConfig config;
  std::string vocabulary_version;
  double c_pos = 0.0;  // box for arg_c
  double c_neg = 0.0;  // box for other
  int full_sweeps = 0;
  std::size_t steps = 0;
};

/// exp(-gamma * ||a - b||^2) over the sparse representations.
double rbf_kernel(const FeatureVector& a, const FeatureVector& b, double gamma);

class NonConvergenceError : public std::runtime_error {
 public:
  NonConvergenceError(const std::string& what, SvmModel best_so_far)
      : std::runtime_error(what), model_(std::move(best_so_far)) {}
  const SvmModel& model() const { return model_; }

 private:
  SvmModel model_;
};

/// Full dual solution, for feasibility checks.
struct SvmSolution {
  SvmModel model;
  std::vector<double> alphas;  // one per training point
  std::vector<double> boxes;   // C_{y_i} per training point
};

/// Platt's SMO on the soft-margin dual with per-class boxes
/// C_y = C * N / (2 * N_y) under inverse_frequency. Throws std::invalid_argument
/// on bad input, NonConvergenceError when max_passes full sweeps do not reach the
/// KKT conditions.
SvmSolution train_full(std::span<const FeatureVector> x, std::span<const Label> y,
                       const SvmConfig& config);
SvmModel train(std::span<const FeatureVector> x, std::span<const Label> y, const SvmConfig& config);

/// sum_i dual_coeffs_i * k(sv_i, x) + bias. Positive means arg_c.
double decision(const SvmModel& model, const FeatureVector& x);

}  // namespace concede
