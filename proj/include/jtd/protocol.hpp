#pragma once

// Detection experiments built on ensemble pairs: P0 is run without the
// signal and P1 with it, and their separability decides detection.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "jtd/discriminator.hpp"
#include "jtd/drive.hpp"
#include "jtd/ensemble.hpp"
#include "jtd/langevin.hpp"
#include "jtd/rng.hpp"

namespace jtd {

enum class Regime { equilibrium, critical, nonequilibrium };

inline const char* to_string(Regime r) noexcept {
  switch (r) {
    case Regime::equilibrium: return "equilibrium";
    case Regime::critical: return "critical";
    case Regime::nonequilibrium: return "nonequilibrium";
  }
  return "unknown";
}

struct Adiabaticity {
  double epsilon;
  Regime regime;
};

/// epsilon = v / beta; the phase follows the well adiabatically when it is
/// below one.
inline Adiabaticity adiabaticity(double v, double beta) {
  if (!(v > 0.0) || !(beta > 0.0)) {
    throw std::invalid_argument("adiabaticity: v and beta must be > 0");
  }
  const double eps = v / beta;
  const Regime r = eps < 1.0 ? Regime::equilibrium
                   : eps == 1.0 ? Regime::critical
                                : Regime::nonequilibrium;
  return {eps, r};
}

inline constexpr double kAucThreshold = 0.7;

struct DetectionOutcome {
  Scd scd0;
  Scd scd1;
  RocResult roc;
  double d_kc = std::numeric_limits<double>::quiet_NaN();  // NaN when undefined
  bool detectable = false;
};

struct EnsemblePair {
  EnsembleSpec p0;
  EnsembleSpec p1;
};

/// Splits one spec into its signal-absent and signal-present ensembles. The
/// two get independent seeds derived from spec.master_seed, so even a null
/// signal yields a genuine two-sample comparison.
inline EnsemblePair make_pair(const EnsembleSpec& spec) {
  EnsemblePair pair{spec, spec};
  pair.p0.drive.signal = NoSignal{};
  pair.p0.master_seed = role_seed(spec.master_seed, SeedRole::signal_absent);
  pair.p1.master_seed = role_seed(spec.master_seed, SeedRole::signal_present);
  return pair;
}

namespace detail {

inline double safe_d_kc(std::span<const double> p0, std::span<const double> p1) {
  if (p0.size() < 2 || p1.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  try {
    return d_kc(p0, p1);
  } catch (const std::domain_error&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

inline void require_same_experiment(const EnsembleSpec& a, const EnsembleSpec& b) {
  if (!(a.config == b.config) || a.drive.v != b.drive.v || a.n_runs != b.n_runs) {
    throw std::invalid_argument("detect: P0 and P1 must share junction, ramp and run count");
  }
}

inline DetectionOutcome compare(Scd scd0, Scd scd1, double auc_threshold) {
  if (scd0.samples.empty() || scd1.samples.empty()) {
    throw std::runtime_error("detect: an ensemble produced no switching events");
  }
  DetectionOutcome out;
  out.roc = roc_curve(scd0.samples, scd1.samples);
  out.d_kc = safe_d_kc(scd0.samples, scd1.samples);
  out.detectable = out.roc.auc_star() >= auc_threshold;
  out.scd0 = std::move(scd0);
  out.scd1 = std::move(scd1);
  return out;
}

}  // namespace detail

/// Runs both ensembles of a pair and compares their raw samples.
inline DetectionOutcome detect(const EnsemblePair& pair, double auc_threshold = kAucThreshold,
                               const RunOptions& options = {}) {
  detail::require_same_experiment(pair.p0, pair.p1);
  return detail::compare(run_ensemble(pair.p0, options), run_ensemble(pair.p1, options),
                         auc_threshold);
}

inline DetectionOutcome detect(const EnsembleSpec& spec, double auc_threshold = kAucThreshold,
                               const RunOptions& options = {}) {
  return detect(make_pair(spec), auc_threshold, options);
}

/// Compares two arbitrary ensembles, e.g. two initial phases or two noise
/// levels. Seeds are used as given.
inline DetectionOutcome contrast(const EnsembleSpec& a, const EnsembleSpec& b,
                                 double auc_threshold = kAucThreshold,
                                 const RunOptions& options = {}) {
  return detail::compare(run_ensemble(a, options), run_ensemble(b, options), auc_threshold);
}

struct SweepPoint {
  double value;
  double auc_raw;
  double auc_star;
  double d_kc;
  std::size_t n0;
  std::size_t n1;
};

struct SweepCurve {
  std::string parameter;
  std::vector<SweepPoint> points;
  double auc_threshold = kAucThreshold;

  /// Index of the largest auc*; the first one on ties.
  std::size_t argmax() const {
    if (points.empty()) throw std::logic_error("argmax of an empty sweep");
    std::size_t best = 0;
    for (std::size_t k = 1; k < points.size(); ++k) {
      if (points[k].auc_star > points[best].auc_star) best = k;
    }
    return best;
  }

  double best_value() const { return points[argmax()].value; }

  /// Smallest grid value whose auc* reaches the threshold.
  std::optional<double> first_detectable() const {
    for (const auto& p : points) {
      if (p.auc_star >= auc_threshold) return p.value;
    }
    return std::nullopt;
  }
};

struct SweepOptions {
  RunOptions run;
  double auc_threshold = kAucThreshold;
  // Called after each grid point, e.g. for progress logging.
  std::function<void(std::size_t, const SweepPoint&)> on_point;
};

inline std::vector<double> linspace(double lo, double hi, std::size_t n) {
  if (n == 0) return {};
  if (n == 1) return {lo};
  std::vector<double> g(n);
  for (std::size_t k = 0; k < n; ++k) {
    g[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
  }
  g.back() = hi;
  return g;
}

inline std::vector<double> default_kappa_grid() { return linspace(0.5, 10.0, 20); }
inline std::vector<double> default_phi0_grid() { return linspace(0.01, 0.3, 30); }

namespace detail {

inline SweepPoint to_point(double value, const DetectionOutcome& d) {
  return {value, d.roc.auc, d.roc.auc_star(), d.d_kc, d.scd0.samples.size(),
          d.scd1.samples.size()};
}

inline void require_grid(std::span<const double> grid, const char* what) {
  if (grid.empty()) throw std::invalid_argument(std::string(what) + ": empty grid");
  for (double x : grid) {
    if (!std::isfinite(x)) throw std::invalid_argument(std::string(what) + ": non-finite grid value");
  }
}

// Every grid point reuses the same two role seeds, so neighbouring points
// differ by their parameter and not by their noise realisation.
template <class Mutate>
SweepCurve sweep_pairs(const char* name, const EnsembleSpec& base, std::span<const double> grid,
                       const SweepOptions& opt, Mutate&& mutate) {
  SweepCurve curve;
  curve.parameter = name;
  curve.auc_threshold = opt.auc_threshold;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    EnsembleSpec s = base;
    mutate(s, grid[k]);
    const auto d = detect(s, opt.auc_threshold, opt.run);
    curve.points.push_back(to_point(grid[k], d));
    if (opt.on_point) opt.on_point(k, curve.points.back());
  }
  return curve;
}

// P0 does not depend on the signal, so signal-only sweeps run it once.
template <class Mutate>
SweepCurve sweep_signal(const char* name, const EnsembleSpec& base, std::span<const double> grid,
                        const SweepOptions& opt, Mutate&& mutate) {
  SweepCurve curve;
  curve.parameter = name;
  curve.auc_threshold = opt.auc_threshold;
  const EnsemblePair pair = make_pair(base);
  const Scd scd0 = run_ensemble(pair.p0, opt.run);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    EnsembleSpec s1 = pair.p1;
    mutate(s1, grid[k]);
    const auto d = compare(scd0, run_ensemble(s1, opt.run), opt.auc_threshold);
    curve.points.push_back(to_point(grid[k], d));
    if (opt.on_point) opt.on_point(k, curve.points.back());
  }
  return curve;
}

}  // namespace detail

/// auc* against kappa = v / beta at fixed phi0 and signal.
inline SweepCurve sweep_kappa(const EnsembleSpec& base, std::span<const double> kappas,
                              const SweepOptions& opt = {}) {
  detail::require_grid(kappas, "sweep_kappa");
  for (double k : kappas) {
    if (!(k > 0.0)) throw std::invalid_argument("sweep_kappa: kappa must be > 0");
  }
  return detail::sweep_pairs("kappa", base, kappas, opt, [](EnsembleSpec& s, double k) {
    s.drive.v = k * s.config.beta;
  });
}

inline SweepCurve sweep_phi0(const EnsembleSpec& base, std::span<const double> phis,
                             const SweepOptions& opt = {}) {
  detail::require_grid(phis, "sweep_phi0");
  return detail::sweep_pairs("phi0", base, phis, opt,
                             [](EnsembleSpec& s, double p) { s.config.phi0 = p; });
}

/// auc* against signal strength: CW amplitude, or photon number for pulses.
inline SweepCurve sweep_amplitude(const EnsembleSpec& base, std::span<const double> strengths,
                                  const SweepOptions& opt = {}) {
  detail::require_grid(strengths, "sweep_amplitude");
  if (!has_signal(base.drive.signal) &&
      std::any_of(strengths.begin(), strengths.end(), [](double x) { return x != 0.0; })) {
    throw std::invalid_argument("sweep_amplitude: spec has no signal to scale");
  }
  for (std::size_t k = 0; k < strengths.size(); ++k) {
    if (!(strengths[k] >= 0.0) || (k > 0 && strengths[k] < strengths[k - 1])) {
      throw std::invalid_argument("sweep_amplitude: strengths must be >= 0 and ascending");
    }
  }
  return detail::sweep_signal("strength", base, strengths, opt, [](EnsembleSpec& s, double x) {
    s.drive.signal = with_strength(s.drive.signal, x);
  });
}

struct BandwidthResult {
  SweepCurve curve;
  double delta_omega;  // nominal band width, equal to beta
  double band_lo;
  double band_hi;
  bool all_in_band_detectable;
  double in_band_variation;  // max - min auc* over in-band points
  std::size_t n_in_band;
};

/// auc* against signal frequency. The nominal band is 1 +- beta / 2.
inline BandwidthResult bandwidth_scan(const EnsembleSpec& base, std::span<const double> omegas,
                                      const SweepOptions& opt = {}) {
  detail::require_grid(omegas, "bandwidth_scan");
  if (!has_signal(base.drive.signal)) {
    throw std::invalid_argument("bandwidth_scan: spec has no signal");
  }
  BandwidthResult r;
  r.curve = detail::sweep_signal("omega", base, omegas, opt, [](EnsembleSpec& s, double w) {
    s.drive.signal = with_frequency(s.drive.signal, w);
  });
  r.delta_omega = base.config.beta;
  r.band_lo = 1.0 - 0.5 * r.delta_omega;
  r.band_hi = 1.0 + 0.5 * r.delta_omega;
  // Grid points computed as 1 +- beta/2 may miss the edges by an ulp.
  const double slack = 1e-12;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  r.all_in_band_detectable = true;
  r.n_in_band = 0;
  for (const auto& p : r.curve.points) {
    if (p.value < r.band_lo - slack || p.value > r.band_hi + slack) continue;
    ++r.n_in_band;
    lo = std::min(lo, p.auc_star);
    hi = std::max(hi, p.auc_star);
    if (p.auc_star < opt.auc_threshold) r.all_in_band_detectable = false;
  }
  r.in_band_variation = r.n_in_band > 0 ? hi - lo : 0.0;
  if (r.n_in_band == 0) r.all_in_band_detectable = false;
  return r;
}

struct DynamicRange {
  double n_min;
  double n_max;
};

namespace detail {

// Largest |residual| of the least-squares line through (x, y).
inline double line_fit_residual(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    mx += x[k];
    my += y[k];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    sxy += (x[k] - mx) * (y[k] - my);
  }
  const double slope = sxx > 0.0 ? sxy / sxx : 0.0;
  double worst = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    worst = std::max(worst, std::abs(y[k] - (my + slope * (x[k] - mx))));
  }
  return worst;
}

}  // namespace detail

/// Photon-number range of linear response. n_min is the first detectable
/// point; the range then grows point by point while a least-squares line
/// through it keeps every residual at or below `tolerance`.
inline DynamicRange dynamic_range(const SweepCurve& curve, double tolerance = 0.02) {
  if (!(tolerance >= 0.0)) throw std::invalid_argument("dynamic_range: tolerance must be >= 0");
  const auto& pts = curve.points;
  std::size_t start = pts.size();
  for (std::size_t k = 0; k < pts.size(); ++k) {
    if (pts[k].auc_star >= curve.auc_threshold) {
      start = k;
      break;
    }
  }
  if (start == pts.size()) {
    throw std::domain_error("dynamic_range: curve never reaches the detection threshold");
  }
  std::vector<double> x{pts[start].value};
  std::vector<double> y{pts[start].auc_star};
  std::size_t end = start;
  for (std::size_t k = start + 1; k < pts.size(); ++k) {
    x.push_back(pts[k].value);
    y.push_back(pts[k].auc_star);
    if (detail::line_fit_residual(x, y) > tolerance) break;
    end = k;
  }
  return {pts[start].value, pts[end].value};
}

/// Minimum detectable CW power i_mw^2 I_c^2 R_mw / (2 chi), in watts.
inline double min_power(double i_mw, double i_c, double r_mw, double chi) {
  if (!(i_mw >= 0.0) || !(i_c > 0.0) || !(r_mw > 0.0) || !(chi > 0.0)) {
    throw std::invalid_argument("min_power: i_mw must be >= 0 and i_c, r_mw, chi > 0");
  }
  return i_mw * i_mw * i_c * i_c * r_mw / (2.0 * chi);
}

namespace si {
inline constexpr double elementary_charge = 1.602176634e-19;  // C, exact
inline constexpr double planck = 6.62607015e-34;              // J s, exact
inline constexpr double hbar = planck / (2.0 * std::numbers::pi);
}  // namespace si

/// Phase offset from an in-plane field through the junction barrier.
struct FluxModulation {
  double b0 = 0.0;         // T
  double l = 33.2e-9;      // effective magnetic thickness d + 2 lambda, m
  double big_l = 1.5e-6;   // junction width, m
  double phi0_base = 0.0;  // rad

  static double effective_length(double d, double lambda) { return d + 2.0 * lambda; }

  void validate() const {
    if (!(l > 0.0) || !(big_l > 0.0)) throw std::invalid_argument("flux lengths must be > 0");
    if (!std::isfinite(b0) || !std::isfinite(phi0_base)) {
      throw std::invalid_argument("flux modulation values must be finite");
    }
  }
};

/// d phi0 / d B0 in rad per tesla.
inline double flux_phase_coefficient(double l, double big_l) {
  return 2.0 * si::elementary_charge * l * big_l / si::hbar;
}

inline double phi0_from_flux(const FluxModulation& m) {
  m.validate();
  return m.phi0_base + flux_phase_coefficient(m.l, m.big_l) * m.b0;
}

}  // namespace jtd
