#pragma once

// Distinguishability of two switching-current samples. P0 is the
// signal-absent distribution and P1 the signal-present one; a sample is
// called positive when i_sw >= threshold.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <iterator>
#include <limits>
#include <span>
#include <utility>
#include <stdexcept>
#include <vector>

namespace jtd {

struct RocPoint {
  double fpr;
  double tpr;
};

struct RocResult {
  std::vector<RocPoint> points;  // (0,0) first, (1,1) last, both rates non-decreasing
  double auc = 0.5;
  std::size_t n0 = 0;
  std::size_t n1 = 0;

  /// Orientation-free separability max(auc, 1 - auc).
  double auc_star() const { return std::max(auc, 1.0 - auc); }
};

namespace detail {

inline void require_samples(std::span<const double> p0, std::span<const double> p1) {
  if (p0.empty() || p1.empty()) {
    throw std::invalid_argument("discriminator: both sample sets must be non-empty");
  }
}

inline std::vector<double> sorted_copy(std::span<const double> x) {
  std::vector<double> s(x.begin(), x.end());
  std::sort(s.begin(), s.end());
  return s;
}

// Fraction of a sorted sample that is >= theta.
inline double fraction_at_or_above(const std::vector<double>& sorted, double theta) {
  const auto it = std::lower_bound(sorted.begin(), sorted.end(), theta);
  return static_cast<double>(sorted.end() - it) / static_cast<double>(sorted.size());
}

inline double trapezoid(std::span<const RocPoint> pts) {
  double area = 0.0;
  for (std::size_t k = 1; k < pts.size(); ++k) {
    area += 0.5 * (pts[k].fpr - pts[k - 1].fpr) * (pts[k].tpr + pts[k - 1].tpr);
  }
  return area;
}

}  // namespace detail

/// Threshold-scan ROC curve. Every distinct value of the pooled samples is a
/// threshold; tpr = P(p1 >= theta), fpr = P(p0 >= theta).
inline RocResult roc_curve(std::span<const double> p0, std::span<const double> p1) {
  detail::require_samples(p0, p1);
  const auto s0 = detail::sorted_copy(p0);
  const auto s1 = detail::sorted_copy(p1);

  std::vector<double> thresholds;
  thresholds.reserve(s0.size() + s1.size());
  std::merge(s0.begin(), s0.end(), s1.begin(), s1.end(), std::back_inserter(thresholds));
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

  RocResult r;
  r.n0 = s0.size();
  r.n1 = s1.size();
  r.points.reserve(thresholds.size() + 1);
  r.points.push_back({0.0, 0.0});
  // Descending thresholds give ascending rates. Two cursors walk the sorted
  // samples, so the scan is linear after sorting.
  std::size_t i0 = s0.size();
  std::size_t i1 = s1.size();
  for (auto it = thresholds.rbegin(); it != thresholds.rend(); ++it) {
    while (i0 > 0 && s0[i0 - 1] >= *it) --i0;
    while (i1 > 0 && s1[i1 - 1] >= *it) --i1;
    r.points.push_back({static_cast<double>(s0.size() - i0) / static_cast<double>(s0.size()),
                        static_cast<double>(s1.size() - i1) / static_cast<double>(s1.size())});
  }
  r.auc = detail::trapezoid(r.points);
  return r;
}

/// Trapezoidal area under the ROC curve.
inline double auc(std::span<const double> p0, std::span<const double> p1) {
  return roc_curve(p0, p1).auc;
}

/// Mann-Whitney form of the AUC: [#(p1 > p0) + #(p1 == p0) / 2] / (n0 n1).
/// Equal to auc() up to rounding; kept as an independent route.
inline double auc_rank(std::span<const double> p0, std::span<const double> p1) {
  detail::require_samples(p0, p1);
  const auto s0 = detail::sorted_copy(p0);
  double wins = 0.0;
  for (double x : p1) {
    const auto lo = std::lower_bound(s0.begin(), s0.end(), x);
    const auto hi = std::upper_bound(lo, s0.end(), x);
    wins += static_cast<double>(lo - s0.begin()) + 0.5 * static_cast<double>(hi - lo);
  }
  return wins / (static_cast<double>(s0.size()) * static_cast<double>(p1.size()));
}

/// Deflection index |mean1 - mean0| / sqrt((var1 + var0) / 2) with unbiased
/// variances. Infinite when both variances vanish and the means differ.
inline double d_kc(std::span<const double> p0, std::span<const double> p1) {
  if (p0.size() < 2 || p1.size() < 2) {
    throw std::invalid_argument("d_kc: each sample set needs at least 2 values");
  }
  auto moments = [](std::span<const double> x) {
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    return std::pair{mean, ss / static_cast<double>(x.size() - 1)};
  };
  const auto [m0, v0] = moments(p0);
  const auto [m1, v1] = moments(p1);
  const double diff = std::abs(m1 - m0);
  const double spread = std::sqrt(0.5 * (v0 + v1));
  if (spread == 0.0) {
    if (diff == 0.0) throw std::domain_error("d_kc: zero variances and equal means (0/0)");
    return std::numeric_limits<double>::infinity();
  }
  return diff / spread;
}

/// Confusion-matrix rates at one threshold, each as a probability.
struct ConfusionRates {
  double tp;
  double fp;
  double fn;
  double tn;
};

inline ConfusionRates confusion_rates(std::span<const double> p0, std::span<const double> p1,
                                      double theta) {
  detail::require_samples(p0, p1);
  const double tp = detail::fraction_at_or_above(detail::sorted_copy(p1), theta);
  const double fp = detail::fraction_at_or_above(detail::sorted_copy(p0), theta);
  return {tp, fp, 1.0 - tp, 1.0 - fp};
}

/// Kolmogorov-Smirnov distance sup |F_n(x) - F(x)| between a sample and a
/// continuous distribution function.
template <std::invocable<double> Cdf>
double ks_distance(std::span<const double> samples, Cdf&& cdf) {
  if (samples.empty()) throw std::invalid_argument("ks_distance: empty sample");
  const auto s = detail::sorted_copy(samples);
  const double n = static_cast<double>(s.size());
  double d = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    const double f = static_cast<double>(cdf(s[k]));
    d = std::max({d, static_cast<double>(k + 1) / n - f, f - static_cast<double>(k) / n});
  }
  return d;
}

/// Two-sample Kolmogorov-Smirnov distance.
inline double ks_distance(std::span<const double> a, std::span<const double> b) {
  detail::require_samples(a, b);
  const auto sa = detail::sorted_copy(a);
  const auto sb = detail::sorted_copy(b);
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < sa.size() && j < sb.size()) {
    const double x = std::min(sa[i], sb[j]);
    while (i < sa.size() && sa[i] == x) ++i;
    while (j < sb.size() && sb[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / static_cast<double>(sa.size()) -
                             static_cast<double>(j) / static_cast<double>(sb.size())));
  }
  return d;
}

/// Piecewise-linear distribution function through tabulated (x, F) pairs,
/// clamped to the end values outside the table.
class TabulatedCdf {
 public:
  TabulatedCdf(std::vector<double> x, std::vector<double> f) : x_(std::move(x)), f_(std::move(f)) {
    if (x_.size() != f_.size() || x_.size() < 2) {
      throw std::invalid_argument("TabulatedCdf: need matching tables of >= 2 points");
    }
  }

  double operator()(double x) const {
    if (x <= x_.front()) return f_.front();
    if (x >= x_.back()) return f_.back();
    const auto it = std::upper_bound(x_.begin(), x_.end(), x);
    const auto k = static_cast<std::size_t>(it - x_.begin());
    const double w = (x - x_[k - 1]) / (x_[k] - x_[k - 1]);
    return f_[k - 1] + w * (f_[k] - f_[k - 1]);
  }

 private:
  std::vector<double> x_;
  std::vector<double> f_;
};

}  // namespace jtd
