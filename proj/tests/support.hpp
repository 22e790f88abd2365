#pragma once

// Helpers shared by the unit tests and the acceptance binary.

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "concede/features.hpp"
#include "concede/svm.hpp"
#include "oracle/qp_oracle.hpp"

namespace support {

inline concede::FeatureVector sparse(const std::vector<double>& dense, const std::string& version = "v") {
  concede::FeatureVector f;
  f.vocabulary_version = version;
  for (std::uint32_t i = 0; i < dense.size(); ++i) {
    if (dense[i] == 0.0) continue;
    f.indices.push_back(i);
    f.values.push_back(dense[i]);
  }
  return f;
}

struct Dataset {
  std::vector<std::vector<double>> points;
  std::vector<concede::Label> labels;
};

// 2..max_points points in `dims` dimensions, roughly half the coordinates zero,
// both classes present.
inline Dataset random_dataset(std::mt19937_64& rng, int max_points, int dims) {
  std::uniform_int_distribution<int> count(2, max_points);
  std::uniform_real_distribution<double> coord(-2.0, 2.0);
  std::bernoulli_distribution zero(0.4), pos(0.5);
  Dataset d;
  const int n = count(rng);
  for (int i = 0; i < n; ++i) {
    std::vector<double> p(static_cast<std::size_t>(dims));
    for (auto& v : p) v = zero(rng) ? 0.0 : std::round(coord(rng) * 100.0) / 100.0;
    d.points.push_back(std::move(p));
    d.labels.push_back(pos(rng) ? concede::Label::ArgC : concede::Label::Other);
  }
  d.labels[0] = concede::Label::ArgC;
  d.labels[1] = concede::Label::Other;
  return d;
}

struct OracleComparison {
  bool oracle_found = false;
  double max_decision_diff = 0.0;
  double max_box_violation = 0.0;
  double equality_residual = 0.0;
};

// Trains SMO and the brute-force dual on the same problem and compares the
// decision values at every training point and at a few probe points.
inline OracleComparison compare_with_oracle(const Dataset& d, const concede::SvmConfig& cfg,
                                            const std::vector<std::vector<double>>& probes = {}) {
  std::vector<concede::FeatureVector> x;
  for (const auto& p : d.points) x.push_back(sparse(p));
  auto sol = concede::train_full(x, d.labels, cfg);

  const std::size_t n = x.size();
  std::vector<std::vector<double>> K(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double dist = 0.0;
      for (std::size_t k = 0; k < d.points[i].size(); ++k) {
        const double t = d.points[i][k] - d.points[j][k];
        dist += t * t;
      }
      K[i][j] = std::exp(-cfg.gamma * dist);
    }
  std::vector<int> y;
  for (auto l : d.labels) y.push_back(concede::label_sign(l));

  OracleComparison cmp;
  for (std::size_t i = 0; i < n; ++i) {
    cmp.max_box_violation = std::max(cmp.max_box_violation, -sol.alphas[i]);
    cmp.max_box_violation = std::max(cmp.max_box_violation, sol.alphas[i] - sol.boxes[i]);
    cmp.equality_residual += sol.alphas[i] * y[i];
  }
  cmp.equality_residual = std::abs(cmp.equality_residual);

  auto qp = oracle::solve_dual(K, y, sol.boxes);
  if (!qp) return cmp;
  cmp.oracle_found = true;

  auto oracle_decision = [&](const std::vector<double>& p) {
    double s = qp->bias;
    for (std::size_t j = 0; j < n; ++j) {
      double dist = 0.0;
      for (std::size_t k = 0; k < p.size(); ++k) {
        const double t = p[k] - d.points[j][k];
        dist += t * t;
      }
      s += qp->alpha[j] * y[j] * std::exp(-cfg.gamma * dist);
    }
    return s;
  };
  std::vector<std::vector<double>> at = d.points;
  at.insert(at.end(), probes.begin(), probes.end());
  for (const auto& p : at) {
    const double diff = std::abs(concede::decision(sol.model, sparse(p)) - oracle_decision(p));
    cmp.max_decision_diff = std::max(cmp.max_decision_diff, diff);
  }
  return cmp;
}

}  // namespace support
