#include "concede/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <list>
#include <memory>
#include <random>
#include <unordered_map>

namespace concede {

namespace {

double squared_distance(const FeatureVector& a, const FeatureVector& b) {
  double s = 0.0;
  std::size_t i = 0, j = 0;
  while (i < a.indices.size() || j < b.indices.size()) {
    double d;
    if (j == b.indices.size() || (i < a.indices.size() && a.indices[i] < b.indices[j])) {
      d = a.values[i++];
    } else if (i == a.indices.size() || b.indices[j] < a.indices[i]) {
      d = b.values[j++];
    } else {
      d = a.values[i++] - b.values[j++];
    }
    s += d * d;
  }
  return s;
}

class KernelCache {
 public:
  using Row = std::shared_ptr<const std::vector<double>>;

  KernelCache(std::span<const FeatureVector> x, double gamma, std::size_t capacity)
      : x_(x), gamma_(gamma), capacity_(std::max<std::size_t>(capacity, 2)) {}

  Row row(std::size_t i) {
    if (auto it = rows_.find(i); it != rows_.end()) {
      lru_.splice(lru_.begin(), lru_, it->second.second);
      return it->second.first;
    }
    auto r = std::make_shared<std::vector<double>>(x_.size());
    for (std::size_t j = 0; j < x_.size(); ++j)
      (*r)[j] = std::exp(-gamma_ * squared_distance(x_[i], x_[j]));
    if (rows_.size() >= capacity_) {
      rows_.erase(lru_.back());
      lru_.pop_back();
    }
    lru_.push_front(i);
    rows_.emplace(i, std::make_pair(Row(r), lru_.begin()));
    return r;
  }

 private:
  std::span<const FeatureVector> x_;
  double gamma_;
  std::size_t capacity_;
  std::list<std::size_t> lru_;
  std::unordered_map<std::size_t, std::pair<Row, std::list<std::size_t>::iterator>> rows_;
};

class Smo {
 public:
  Smo(std::span<const FeatureVector> x, std::span<const Label> labels, const SvmConfig& cfg,
      double c_pos, double c_neg)
      : x_(x), cfg_(cfg), cache_(x, cfg.gamma, cfg.cache_rows), rng_(cfg.seed) {
    const std::size_t n = x.size();
    y_.resize(n);
    box_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      y_[i] = label_sign(labels[i]);
      box_[i] = y_[i] > 0 ? c_pos : c_neg;
    }
    alpha_.assign(n, 0.0);
    // g_i = sum_j alpha_j y_j K_ij - y_i; zero alphas give -y_i.
    g_.resize(n);
    for (std::size_t i = 0; i < n; ++i) g_[i] = -y_[i];
    diag_.resize(n);
    for (std::size_t i = 0; i < n; ++i) diag_[i] = std::exp(-cfg.gamma * squared_distance(x[i], x[i]));
  }

  // Returns false when max_passes full sweeps were used without converging.
  bool run() {
    const std::size_t n = x_.size();
    bool examine_all = true;
    std::size_t changed = 0;
    const std::size_t step_cap = std::max<std::size_t>(1000000, 2000 * n);
    while (changed > 0 || examine_all) {
      changed = 0;
      if (examine_all) {
        if (full_sweeps_ >= cfg_.max_passes) return false;
        ++full_sweeps_;
        const std::size_t off = pick(n);
        for (std::size_t k = 0; k < n; ++k) changed += examine((off + k) % n);
      } else {
        const std::size_t off = pick(n);
        for (std::size_t k = 0; k < n; ++k) {
          const std::size_t i = (off + k) % n;
          if (is_free(i)) changed += examine(i);
        }
      }
      if (steps_ > step_cap) return false;
      if (examine_all)
        examine_all = false;
      else if (changed == 0)
        examine_all = true;
    }
    return true;
  }

  void finalize_bias() {
    double sum = 0.0;
    std::size_t free = 0;
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < x_.size(); ++i) {
      const double bi = -g_[i];  // bias making y_i f(x_i) = 1
      if (is_free(i)) {
        sum += bi;
        ++free;
      } else if ((alpha_[i] <= 0.0) == (y_[i] > 0)) {
        lo = std::max(lo, bi);
      } else {
        hi = std::min(hi, bi);
      }
    }
    if (free > 0) {
      b_ = sum / static_cast<double>(free);
    } else if (std::isfinite(lo) && std::isfinite(hi)) {
      b_ = (lo + hi) / 2.0;
    } else {
      b_ = std::isfinite(lo) ? lo : hi;
    }
  }

  const std::vector<double>& alphas() const { return alpha_; }
  const std::vector<double>& boxes() const { return box_; }
  const std::vector<int>& signs() const { return y_; }
  double bias() const { return b_; }
  int full_sweeps() const { return full_sweeps_; }
  std::size_t steps() const { return steps_; }

 private:
  bool is_free(std::size_t i) const { return alpha_[i] > 0.0 && alpha_[i] < box_[i]; }
  double err(std::size_t i) const { return g_[i] + b_; }

  std::size_t pick(std::size_t n) {
    return n == 0 ? 0 : std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_);
  }

  std::size_t examine(std::size_t i2) {
    const double e2 = err(i2);
    const double r2 = e2 * y_[i2];
    const double tol = cfg_.tolerance;
    if (!((r2 < -tol && alpha_[i2] < box_[i2]) || (r2 > tol && alpha_[i2] > 0.0))) return 0;

    const std::size_t n = x_.size();
    std::size_t best = n;
    double best_gap = -1.0;
    std::size_t free_count = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!is_free(i)) continue;
      ++free_count;
      const double gap = std::abs(err(i) - e2);
      if (gap > best_gap) best_gap = gap, best = i;
    }
    if (free_count > 1 && best < n && step(best, i2)) return 1;

    std::size_t off = pick(n);
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t i1 = (off + k) % n;
      if (is_free(i1) && step(i1, i2)) return 1;
    }
    off = pick(n);
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t i1 = (off + k) % n;
      if (!is_free(i1) && step(i1, i2)) return 1;
    }
    return 0;
  }

  bool step(std::size_t i1, std::size_t i2) {
    if (i1 == i2) return false;
    const double a1 = alpha_[i1], a2 = alpha_[i2];
    const int y1 = y_[i1], y2 = y_[i2];
    const double c1 = box_[i1], c2 = box_[i2];
    const double e1 = err(i1), e2 = err(i2);
    const int s = y1 * y2;

    double lo, hi;
    if (y1 != y2) {
      lo = std::max(0.0, a2 - a1);
      hi = std::min(c2, c1 + a2 - a1);
    } else {
      lo = std::max(0.0, a1 + a2 - c1);
      hi = std::min(c2, a1 + a2);
    }
    if (hi - lo <= 1e-15 * std::max(1.0, c2)) return false;

    auto row1 = cache_.row(i1);
    auto row2 = cache_.row(i2);
    const double k11 = diag_[i1], k22 = diag_[i2], k12 = (*row1)[i2];
    const double eta = k11 + k22 - 2.0 * k12;

    double a2n;
    if (eta > 1e-12) {
      a2n = std::clamp(a2 + y2 * (e1 - e2) / eta, lo, hi);
    } else {
      // Objective at both ends of the segment; bias-free form.
      const double f1 = y1 * g_[i1] - a1 * k11 - s * a2 * k12;
      const double f2 = y2 * g_[i2] - s * a1 * k12 - a2 * k22;
      auto obj = [&](double a2v) {
        const double a1v = a1 + s * (a2 - a2v);
        return a1v * f1 + a2v * f2 + 0.5 * a1v * a1v * k11 + 0.5 * a2v * a2v * k22 +
               s * a2v * a1v * k12;
      };
      const double ol = obj(lo), oh = obj(hi);
      if (ol < oh - 1e-12)
        a2n = lo;
      else if (ol > oh + 1e-12)
        a2n = hi;
      else
        a2n = a2;
    }
    const double snap2 = 1e-12 * c2;
    if (a2n < snap2) a2n = 0.0;
    else if (a2n > c2 - snap2) a2n = c2;
    if (std::abs(a2n - a2) < 1e-12 * (a2n + a2 + 1e-12)) return false;

    double a1n = a1 + s * (a2 - a2n);
    const double snap1 = 1e-12 * c1;
    if (a1n < snap1) a1n = 0.0;
    else if (a1n > c1 - snap1) a1n = c1;

    const double d1 = y1 * (a1n - a1), d2 = y2 * (a2n - a2);
    const double b1 = b_ - e1 - d1 * k11 - d2 * k12;
    const double b2 = b_ - e2 - d1 * k12 - d2 * k22;
    const bool free1 = a1n > 0.0 && a1n < c1;
    const bool free2 = a2n > 0.0 && a2n < c2;
    if (free1)
      b_ = b1;
    else if (free2)
      b_ = b2;
    else
      b_ = (b1 + b2) / 2.0;

    for (std::size_t i = 0; i < g_.size(); ++i) g_[i] += d1 * (*row1)[i] + d2 * (*row2)[i];
    alpha_[i1] = a1n;
    alpha_[i2] = a2n;
    ++steps_;
    return true;
  }

  std::span<const FeatureVector> x_;
  SvmConfig cfg_;
  KernelCache cache_;
  std::mt19937_64 rng_;
  std::vector<int> y_;
  std::vector<double> box_, alpha_, g_, diag_;
  double b_ = 0.0;
  int full_sweeps_ = 0;
  std::size_t steps_ = 0;
};

}  // namespace

std::string_view to_string(ClassWeightMode mode) {
  return mode == ClassWeightMode::Uniform ? "uniform" : "inverse_frequency";
}

std::optional<ClassWeightMode> parse_class_weight_mode(std::string_view s) {
  if (s == "uniform") return ClassWeightMode::Uniform;
  if (s == "inverse_frequency") return ClassWeightMode::InverseFrequency;
  return std::nullopt;
}

void SvmConfig::validate() const {
  if (!(c > 0.0) || !std::isfinite(c)) throw std::invalid_argument("svm: c must be positive");
  if (!(gamma > 0.0) || !std::isfinite(gamma))
    throw std::invalid_argument("svm: gamma must be positive");
  if (!(tolerance > 0.0)) throw std::invalid_argument("svm: tolerance must be positive");
  if (max_passes < 1) throw std::invalid_argument("svm: max_passes must be at least 1");
}

SvmConfig resolve_gamma(SvmConfig config, std::size_t num_features) {
  if (config.gamma == 0.0) config.gamma = 1.0 / static_cast<double>(std::max<std::size_t>(num_features, 1));
  return config;
}

double rbf_kernel(const FeatureVector& a, const FeatureVector& b, double gamma) {
  if (a.vocabulary_version != b.vocabulary_version)
    throw VersionMismatchError(a.vocabulary_version, b.vocabulary_version);
  return std::exp(-gamma * squared_distance(a, b));
}

SvmSolution train_full(std::span<const FeatureVector> x, std::span<const Label> y,
                       const SvmConfig& config) {
  config.validate();
  if (x.size() != y.size()) throw std::invalid_argument("svm: vectors and labels differ in length");
  if (x.size() < 2) throw std::invalid_argument("svm: at least two training instances required");
  std::size_t n_pos = 0;
  for (auto l : y) n_pos += l == Label::ArgC;
  const std::size_t n_neg = y.size() - n_pos;
  if (n_pos == 0 || n_neg == 0) throw std::invalid_argument("svm: both classes must be present");
  for (const auto& v : x)
    if (v.vocabulary_version != x.front().vocabulary_version)
      throw VersionMismatchError(x.front().vocabulary_version, v.vocabulary_version);

  double c_pos = config.c, c_neg = config.c;
  if (config.class_weight_mode == ClassWeightMode::InverseFrequency) {
    const double n = static_cast<double>(y.size());
    c_pos = config.c * n / (2.0 * static_cast<double>(n_pos));
    c_neg = config.c * n / (2.0 * static_cast<double>(n_neg));
  }

  Smo smo(x, y, config, c_pos, c_neg);
  const bool converged = smo.run();
  smo.finalize_bias();

  SvmSolution sol;
  sol.alphas = smo.alphas();
  sol.boxes = smo.boxes();
  auto& m = sol.model;
  m.config = config;
  m.vocabulary_version = x.front().vocabulary_version;
  m.bias = smo.bias();
  m.c_pos = c_pos;
  m.c_neg = c_neg;
  m.full_sweeps = smo.full_sweeps();
  m.steps = smo.steps();
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (sol.alphas[i] <= 0.0) continue;
    m.support_vectors.push_back(x[i]);
    m.dual_coeffs.push_back(sol.alphas[i] * smo.signs()[i]);
  }
  if (!converged)
    throw NonConvergenceError("svm: SMO did not converge within " +
                                  std::to_string(config.max_passes) + " full sweeps",
                              std::move(m));
  return sol;
}

SvmModel train(std::span<const FeatureVector> x, std::span<const Label> y, const SvmConfig& config) {
  return train_full(x, y, config).model;
}

double decision(const SvmModel& model, const FeatureVector& x) {
  if (x.vocabulary_version != model.vocabulary_version)
    throw VersionMismatchError(model.vocabulary_version, x.vocabulary_version);
  double s = model.bias;
  for (std::size_t i = 0; i < model.support_vectors.size(); ++i)
    s += model.dual_coeffs[i] * std::exp(-model.config.gamma *
                                         squared_distance(model.support_vectors[i], x));
  return s;
}

}  // namespace concede
