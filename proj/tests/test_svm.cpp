#include <doctest.h>

#include <cmath>
#include <random>

#include "concede/svm.hpp"
#include "support.hpp"

using namespace concede;
using support::sparse;

namespace {

SvmConfig config(double c, double gamma, double tol = 1e-6) {
  SvmConfig cfg;
  cfg.c = c;
  cfg.gamma = gamma;
  cfg.tolerance = tol;
  cfg.max_passes = 1000;
  return cfg;
}

}  // namespace

TEST_SUITE("svm") {
  TEST_CASE("rbf kernel") {
    auto a = sparse({1.0, 0.0}), b = sparse({0.0, 1.0});
    CHECK(rbf_kernel(a, a, 0.7) == 1.0);
    CHECK(rbf_kernel(a, b, 0.5) == doctest::Approx(0.36787944117144233).epsilon(1e-15));
    CHECK(rbf_kernel(a, b, 1e-12) == doctest::Approx(1.0));
    CHECK_THROWS_AS(rbf_kernel(a, sparse({1.0}, "w"), 1.0), VersionMismatchError);
  }

  TEST_CASE("symmetric 1-D problem has its boundary at zero") {
    std::vector<FeatureVector> x = {sparse({-1.0}), sparse({1.0})};
    std::vector<Label> y = {Label::Other, Label::ArgC};
    auto m = train(x, y, config(100.0, 0.5));
    CHECK(std::abs(decision(m, sparse({0.0}))) < 1e-6);
    CHECK(decision(m, sparse({1.0})) > 0.0);
    CHECK(decision(m, sparse({-1.0})) < 0.0);
  }

  TEST_CASE("xor is separable with an rbf kernel") {
    support::Dataset d;
    d.points = {{0, 0}, {1, 1}, {0, 1}, {1, 0}};
    d.labels = {Label::Other, Label::Other, Label::ArgC, Label::ArgC};
    auto cfg = config(10.0, 1.0);
    std::vector<FeatureVector> x;
    for (const auto& p : d.points) x.push_back(sparse(p));
    auto m = train(x, d.labels, cfg);
    for (std::size_t i = 0; i < x.size(); ++i)
      CHECK(label_from_decision(decision(m, x[i])) == d.labels[i]);
    auto cmp = support::compare_with_oracle(d, cfg);
    REQUIRE(cmp.oracle_found);
    CHECK(cmp.max_decision_diff < 1e-4);
  }

  TEST_CASE("duplicated dataset keeps the decision signs") {
    support::Dataset d;
    d.points = {{0.0, 0.5}, {1.0, 0.2}, {0.3, 1.5}, {1.2, 1.1}, {0.9, 0.0}};
    d.labels = {Label::ArgC, Label::ArgC, Label::Other, Label::Other, Label::ArgC};
    auto cfg = config(1.0, 1.0);
    std::vector<FeatureVector> x, x2;
    std::vector<Label> y2;
    for (std::size_t i = 0; i < d.points.size(); ++i) {
      x.push_back(sparse(d.points[i]));
      for (int r = 0; r < 2; ++r) {
        x2.push_back(sparse(d.points[i]));
        y2.push_back(d.labels[i]);
      }
    }
    auto m1 = train(x, d.labels, cfg);
    auto m2 = train(x2, y2, cfg);
    for (const auto& p : x) CHECK((decision(m1, p) >= 0) == (decision(m2, p) >= 0));
  }

  TEST_CASE("randomized problems agree with the brute-force dual") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 40; ++trial) {
      auto d = support::random_dataset(rng, 6, 2 + trial % 7);
      const double cs[] = {0.5, 1.0, 10.0};
      auto cfg = config(cs[trial % 3], trial % 2 ? 1.0 : 0.1);
      cfg.seed = static_cast<std::uint64_t>(trial);
      auto cmp = support::compare_with_oracle(d, cfg, {std::vector<double>(d.points[0].size(), 0.0)});
      INFO("trial " << trial);
      REQUIRE(cmp.oracle_found);
      CHECK(cmp.max_decision_diff < 1e-4);
      CHECK(cmp.max_box_violation <= 1e-8);
      CHECK(cmp.equality_residual <= 1e-8);
    }
  }

  TEST_CASE("per-class boxes follow inverse frequency") {
    std::vector<FeatureVector> x = {sparse({0.0}), sparse({0.1}), sparse({0.2}), sparse({3.0})};
    std::vector<Label> y = {Label::Other, Label::Other, Label::Other, Label::ArgC};
    auto m = train(x, y, config(2.0, 1.0));
    CHECK(m.c_pos == doctest::Approx(2.0 * 4.0 / 2.0));
    CHECK(m.c_neg == doctest::Approx(2.0 * 4.0 / 6.0));
    auto cfg = config(2.0, 1.0);
    cfg.class_weight_mode = ClassWeightMode::Uniform;
    auto u = train(x, y, cfg);
    CHECK(u.c_pos == 2.0);
    CHECK(u.c_neg == 2.0);
  }

  TEST_CASE("training is deterministic for a seed") {
    std::mt19937_64 rng(3);
    auto d = support::random_dataset(rng, 6, 4);
    std::vector<FeatureVector> x;
    for (const auto& p : d.points) x.push_back(sparse(p));
    auto cfg = config(1.0, 0.5);
    auto a = train(x, d.labels, cfg), b = train(x, d.labels, cfg);
    CHECK(a.dual_coeffs == b.dual_coeffs);
    CHECK(a.bias == b.bias);
  }

  TEST_CASE("scaling the dual solution keeps every sign") {
    std::vector<FeatureVector> x = {sparse({0.0}), sparse({1.0}), sparse({2.0}), sparse({3.0})};
    std::vector<Label> y = {Label::Other, Label::Other, Label::ArgC, Label::ArgC};
    auto m = train(x, y, config(1.0, 1.0));
    auto s = m;
    for (auto& c : s.dual_coeffs) c *= 3.5;
    s.bias *= 3.5;
    for (double p = -1.0; p <= 4.0; p += 0.25)
      CHECK((decision(m, sparse({p})) >= 0) == (decision(s, sparse({p})) >= 0));
  }

  TEST_CASE("input errors") {
    std::vector<FeatureVector> x = {sparse({0.0}), sparse({1.0})};
    std::vector<Label> same = {Label::ArgC, Label::ArgC};
    CHECK_THROWS_AS(train(x, same, config(1.0, 1.0)), std::invalid_argument);
    std::vector<Label> one = {Label::ArgC};
    CHECK_THROWS_AS(train(x, one, config(1.0, 1.0)), std::invalid_argument);
    std::vector<Label> y = {Label::ArgC, Label::Other};
    CHECK_THROWS_AS(train(x, y, config(-1.0, 1.0)), std::invalid_argument);
    auto m = train(x, y, config(1.0, 1.0));
    CHECK_THROWS_AS(decision(m, sparse({1.0}, "w")), VersionMismatchError);
    std::vector<FeatureVector> mixed = {sparse({0.0}), sparse({1.0}, "w")};
    CHECK_THROWS_AS(train(mixed, y, config(1.0, 1.0)), VersionMismatchError);
  }

  TEST_CASE("non-convergence carries a model") {
    std::mt19937_64 rng(11);
    std::vector<FeatureVector> x;
    std::vector<Label> y;
    for (int i = 0; i < 200; ++i) {
      x.push_back(sparse({std::uniform_real_distribution<double>(-1, 1)(rng),
                          std::uniform_real_distribution<double>(-1, 1)(rng)}));
      y.push_back(i % 2 ? Label::ArgC : Label::Other);
    }
    auto cfg = config(100.0, 5.0, 1e-9);
    cfg.max_passes = 1;
    try {
      train(x, y, cfg);
      FAIL("expected NonConvergenceError");
    } catch (const NonConvergenceError& e) {
      CHECK(e.model().vocabulary_version == "v");
      CHECK_FALSE(e.model().dual_coeffs.empty());
    }
  }

  TEST_CASE("gamma resolution") {
    SvmConfig cfg;
    CHECK(resolve_gamma(cfg, 4).gamma == 0.25);
    cfg.gamma = 2.0;
    CHECK(resolve_gamma(cfg, 4).gamma == 2.0);
  }
}
