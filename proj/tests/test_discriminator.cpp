#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "jtd/discriminator.hpp"

using namespace jtd;
using V = std::vector<double>;

namespace {

// O(n0 n1) pair count with half-weight ties.
double pair_count_auc(const V& p0, const V& p1) {
  double wins = 0.0;
  for (double a : p0) {
    for (double b : p1) wins += b > a ? 1.0 : b == a ? 0.5 : 0.0;
  }
  return wins / (static_cast<double>(p0.size()) * static_cast<double>(p1.size()));
}

V draw(std::mt19937_64& gen, std::size_t n, bool discrete) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> k(0, 5);
  V x(n);
  for (auto& v : x) v = discrete ? static_cast<double>(k(gen)) : u(gen);
  return x;
}

}  // namespace

TEST(Roc, Examples) {
  EXPECT_EQ(auc(V{1, 2}, V{3, 4}), 1.0);
  EXPECT_EQ(auc(V{1, 3}, V{2, 4}), 0.75);
  EXPECT_EQ(auc(V{5}, V{5}), 0.5);
  EXPECT_EQ(auc(V{0}, V{1}), 1.0);
  const V same{0.9, 0.91, 0.91, 0.95, 0.97};
  EXPECT_EQ(auc(same, same), 0.5);
}

TEST(Roc, EmptyInputIsAnError) {
  EXPECT_THROW(roc_curve(V{}, V{1}), std::invalid_argument);
  EXPECT_THROW(roc_curve(V{1}, V{}), std::invalid_argument);
  EXPECT_THROW(confusion_rates(V{}, V{1}, 0.0), std::invalid_argument);
}

TEST(Roc, CurveShape) {
  std::mt19937_64 gen(1);
  for (int t = 0; t < 200; ++t) {
    const auto p0 = draw(gen, 1 + t % 17, t % 2 == 0);
    const auto p1 = draw(gen, 1 + t % 13, t % 2 == 0);
    const auto r = roc_curve(p0, p1);
    ASSERT_GE(r.points.size(), 2u);
    EXPECT_EQ(r.points.front().fpr, 0.0);
    EXPECT_EQ(r.points.front().tpr, 0.0);
    EXPECT_EQ(r.points.back().fpr, 1.0);
    EXPECT_EQ(r.points.back().tpr, 1.0);
    for (std::size_t k = 1; k < r.points.size(); ++k) {
      EXPECT_GE(r.points[k].fpr, r.points[k - 1].fpr);
      EXPECT_GE(r.points[k].tpr, r.points[k - 1].tpr);
    }
    EXPECT_GE(r.auc, 0.0);
    EXPECT_LE(r.auc, 1.0);
    EXPECT_EQ(r.n0, p0.size());
    EXPECT_EQ(r.n1, p1.size());
  }
}

TEST(Roc, MatchesPairCountOracle) {
  std::mt19937_64 gen(2);
  std::uniform_int_distribution<std::size_t> size(1, 40);
  for (int t = 0; t < 1000; ++t) {
    const bool discrete = t % 3 == 0;
    const auto p0 = draw(gen, size(gen), discrete);
    const auto p1 = draw(gen, size(gen), discrete);
    const double oracle = pair_count_auc(p0, p1);
    EXPECT_NEAR(auc(p0, p1), oracle, 1e-12);
    EXPECT_NEAR(auc_rank(p0, p1), oracle, 1e-12);
  }
  const auto p0 = draw(gen, 100, false);
  const auto p1 = draw(gen, 100, false);
  EXPECT_NEAR(auc(p0, p1), pair_count_auc(p0, p1), 1e-12);
}

TEST(Roc, SwapSymmetry) {
  std::mt19937_64 gen(3);
  for (int t = 0; t < 200; ++t) {
    const auto a = draw(gen, 30, false);
    const auto b = draw(gen, 25, false);
    EXPECT_NEAR(auc(a, b) + auc(b, a), 1.0, 1e-12);
    EXPECT_DOUBLE_EQ(roc_curve(a, b).auc_star(), roc_curve(b, a).auc_star());
  }
}

TEST(Roc, InvariantUnderIncreasingTransform) {
  std::mt19937_64 gen(4);
  for (int t = 0; t < 100; ++t) {
    auto a = draw(gen, 30, t % 2 == 0);
    auto b = draw(gen, 30, t % 2 == 0);
    const double before = auc(a, b);
    for (auto* s : {&a, &b}) {
      for (auto& x : *s) x = std::exp(3.0 * x) - 7.0;
    }
    EXPECT_EQ(auc(a, b), before);
  }
}

TEST(Roc, DuplicateThresholdsDoNotChangeArea) {
  // Oracle: a scan over every pooled value, duplicates included, traced
  // point by point. Repeated thresholds add zero-width segments.
  std::mt19937_64 gen(5);
  for (int t = 0; t < 200; ++t) {
    const auto p0 = draw(gen, 12, true);
    const auto p1 = draw(gen, 9, true);
    V pooled = p0;
    pooled.insert(pooled.end(), p1.begin(), p1.end());
    std::sort(pooled.rbegin(), pooled.rend());
    std::vector<RocPoint> pts{{0.0, 0.0}};
    for (double th : pooled) {
      const auto c = confusion_rates(p0, p1, th);
      pts.push_back({c.fp, c.tp});
    }
    double area = 0.0;
    for (std::size_t k = 1; k < pts.size(); ++k) {
      area += 0.5 * (pts[k].fpr - pts[k - 1].fpr) * (pts[k].tpr + pts[k - 1].tpr);
    }
    EXPECT_NEAR(auc(p0, p1), area, 1e-12);
  }
}

TEST(Roc, AucStarOrientation) {
  const auto r = roc_curve(V{3, 4}, V{1, 2});
  EXPECT_EQ(r.auc, 0.0);
  EXPECT_EQ(r.auc_star(), 1.0);
}

TEST(Confusion, Examples) {
  const V p0{1, 2, 3, 4};
  const V p1{2, 3, 4, 5};
  auto c = confusion_rates(p0, p1, -10.0);
  EXPECT_EQ(c.tp, 1.0);
  EXPECT_EQ(c.fp, 1.0);
  c = confusion_rates(p0, p1, 10.0);
  EXPECT_EQ(c.tp, 0.0);
  EXPECT_EQ(c.fp, 0.0);
  c = confusion_rates(p0, p1, 2.5);
  EXPECT_EQ(c.fp, 0.5);
  EXPECT_EQ(c.tn, 0.5);
  EXPECT_EQ(c.tp, 0.75);
  EXPECT_EQ(c.fn, 0.25);
}

TEST(Confusion, ConsistentWithRocPoints) {
  std::mt19937_64 gen(6);
  const auto p0 = draw(gen, 50, true);
  const auto p1 = draw(gen, 40, true);
  const auto r = roc_curve(p0, p1);
  // Distinct pooled thresholds in descending order map onto points[1..].
  V th = p0;
  th.insert(th.end(), p1.begin(), p1.end());
  std::sort(th.rbegin(), th.rend());
  th.erase(std::unique(th.begin(), th.end()), th.end());
  ASSERT_EQ(r.points.size(), th.size() + 1);
  for (std::size_t k = 0; k < th.size(); ++k) {
    const auto c = confusion_rates(p0, p1, th[k]);
    EXPECT_EQ(r.points[k + 1].fpr, c.fp);
    EXPECT_EQ(r.points[k + 1].tpr, c.tp);
  }
}

TEST(DKc, Examples) {
  const V a{1.0, 2.0, 4.0};
  EXPECT_EQ(d_kc(a, a), 0.0);
  EXPECT_EQ(d_kc(V{0, 0}, V{1, 1}), std::numeric_limits<double>::infinity());
  EXPECT_THROW(d_kc(V{1, 1}, V{1, 1}), std::domain_error);
  EXPECT_THROW(d_kc(V{1}, V{1, 2}), std::invalid_argument);
  // mean 0.5 vs 2.5, unbiased variances 0.5 and 0.5.
  EXPECT_DOUBLE_EQ(d_kc(V{0, 1}, V{2, 3}), 2.0 / std::sqrt(0.5));
}

TEST(DKc, GaussianOracle) {
  std::mt19937_64 gen(7);
  std::normal_distribution<double> n0(0.0, 1.0), n1(1.0, 1.0);
  V a(200000), b(200000);
  for (auto& x : a) x = n0(gen);
  for (auto& x : b) x = n1(gen);
  EXPECT_NEAR(d_kc(a, b), 1.0, 0.1);
}

TEST(DKc, ShiftAndScaleInvariance) {
  std::mt19937_64 gen(8);
  for (int t = 0; t < 100; ++t) {
    auto a = draw(gen, 20, false);
    auto b = draw(gen, 30, false);
    const double d = d_kc(a, b);
    auto a2 = a, b2 = b;
    for (auto& x : a2) x = 3.5 * x - 2.0;
    for (auto& x : b2) x = 3.5 * x - 2.0;
    EXPECT_NEAR(d_kc(a2, b2), d, 1e-9 * (1.0 + d));
    EXPECT_NEAR(d_kc(b, a), d, 1e-12 * (1.0 + d));
  }
}

TEST(Ks, OneSample) {
  EXPECT_DOUBLE_EQ(ks_distance(V{0.5}, [](double x) { return x; }), 0.5);
  EXPECT_DOUBLE_EQ(ks_distance(V{0.25, 0.75}, [](double x) { return x; }), 0.25);
  std::mt19937_64 gen(9);
  const auto u = draw(gen, 10000, false);
  EXPECT_LT(ks_distance(u, [](double x) { return std::clamp(x, 0.0, 1.0); }), 0.02);
  EXPECT_GT(ks_distance(u, [](double x) { return std::clamp(x * x, 0.0, 1.0); }), 0.2);
}

TEST(Ks, TwoSample) {
  EXPECT_EQ(ks_distance(V{1, 2, 3}, V{1, 2, 3}), 0.0);
  EXPECT_EQ(ks_distance(V{1, 2}, V{3, 4}), 1.0);
  // Brute force over every pooled point.
  std::mt19937_64 gen(10);
  for (int t = 0; t < 100; ++t) {
    const auto a = draw(gen, 15, true);
    const auto b = draw(gen, 11, true);
    double oracle = 0.0;
    for (const auto* s : {&a, &b}) {
      for (double x : *s) {
        double fa = 0, fb = 0;
        for (double y : a) fa += y <= x;
        for (double y : b) fb += y <= x;
        oracle = std::max(oracle, std::abs(fa / a.size() - fb / b.size()));
      }
    }
    EXPECT_NEAR(ks_distance(a, b), oracle, 1e-15);
  }
}

TEST(TabulatedCdf, Interpolates) {
  const TabulatedCdf f({0.0, 1.0, 2.0}, {0.0, 0.5, 0.9});
  EXPECT_EQ(f(-1.0), 0.0);
  EXPECT_DOUBLE_EQ(f(0.5), 0.25);
  EXPECT_DOUBLE_EQ(f(1.5), 0.7);
  EXPECT_EQ(f(5.0), 0.9);
  EXPECT_THROW(TabulatedCdf({0.0}, {0.0}), std::invalid_argument);
}
