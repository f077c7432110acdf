#pragma once

// Closed-form physics of the tilted washboard potential. Energies are in
// units of the Josephson energy E_J0, currents in units of I_c and rates in
// units of the plasma frequency omega_J (so a rate is per unit of
// dimensionless time tau = omega_J t).

#include <cmath>
#include <concepts>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace jtd::washboard {

namespace detail {

inline void require_unit_interval(double i_b, const char* what) {
  if (!(i_b >= 0.0 && i_b <= 1.0)) {
    throw std::domain_error(std::string(what) +
                            ": bias current must lie in [0, 1], got " +
                            std::to_string(i_b));
  }
}

// 1 - i^2 without cancellation near i = 1.
inline double one_minus_square(double i_b) noexcept {
  return (1.0 - i_b) * (1.0 + i_b);
}

}  // namespace detail

/// U/E_J0 = 1 - cos(phi) - i_b * phi. Defined for every bias.
inline double potential(double phi, double i_b) noexcept {
  return 1.0 - std::cos(phi) - i_b * phi;
}

/// Well bottom arcsin(i_b) and barrier top pi - arcsin(i_b) of the well
/// that contains phi = 0.
inline double well_minimum(double i_b) {
  detail::require_unit_interval(i_b, "well_minimum");
  return std::asin(i_b);
}

inline double barrier_top(double i_b) {
  detail::require_unit_interval(i_b, "barrier_top");
  return std::numbers::pi - std::asin(i_b);
}

/// Delta U / E_J0 = 2 [sqrt(1 - i_b^2) - i_b arccos(i_b)].
inline double barrier_height(double i_b) {
  detail::require_unit_interval(i_b, "barrier_height");
  return 2.0 * (std::sqrt(detail::one_minus_square(i_b)) -
                i_b * std::acos(i_b));
}

/// omega_p / omega_J = (1 - i_b^2)^(1/4).
inline double omega_ratio(double i_b) {
  detail::require_unit_interval(i_b, "omega_ratio");
  return std::sqrt(std::sqrt(detail::one_minus_square(i_b)));
}

/// Parameters of the escape-rate layer.
struct EscapeRateParams {
  double theta = 5e-4;   // k_B T / E_J0
  double a_th = 1.0;     // thermal prefactor, 0 < a_th <= 1
  double quality_q = 1e4;  // Q = 1 / (omega_p R C)
  double hbar_omega_over_ej = 1e-2;  // hbar omega_p / E_J0

  void validate() const {
    if (!(theta > 0.0)) throw std::invalid_argument("theta must be > 0");
    if (!(a_th > 0.0 && a_th <= 1.0)) {
      throw std::invalid_argument("a_th must lie in (0, 1]");
    }
    if (!(quality_q > 0.0)) throw std::invalid_argument("quality_q must be > 0");
    if (!(hbar_omega_over_ej > 0.0)) {
      throw std::invalid_argument("hbar_omega_over_ej must be > 0");
    }
  }
};

/// Thermal-activation rate (omega_p / 2 pi) a_th exp(-Delta U / theta),
/// returned as Gamma / omega_J.
inline double thermal_rate(double i_b, double theta, double a_th = 1.0) {
  if (!(theta > 0.0)) throw std::domain_error("thermal_rate: theta must be > 0");
  const double du = barrier_height(i_b);
  return omega_ratio(i_b) / (2.0 * std::numbers::pi) * a_th *
         std::exp(-du / theta);
}

/// a_q = sqrt(864 pi Delta U / hbar omega_p).
inline double quantum_prefactor(double delta_u, double hbar_omega_over_ej) {
  if (!(delta_u >= 0.0)) throw std::domain_error("quantum_prefactor: delta_u < 0");
  if (!(hbar_omega_over_ej > 0.0)) {
    throw std::domain_error("quantum_prefactor: hbar_omega_over_ej must be > 0");
  }
  return std::sqrt(864.0 * std::numbers::pi * delta_u / hbar_omega_over_ej);
}

/// Tunnelling rate (omega_p / 2 pi) a_q exp[-(Delta U / theta)(1 + 0.87/Q)],
/// as Gamma / omega_J. Analytic only; the simulator is classical.
inline double quantum_rate(double i_b, double theta, double quality_q,
                           double hbar_omega_over_ej) {
  if (!(theta > 0.0)) throw std::domain_error("quantum_rate: theta must be > 0");
  if (!(quality_q > 0.0)) {
    throw std::domain_error("quantum_rate: quality_q must be > 0");
  }
  const double du = barrier_height(i_b);
  const double a_q = quantum_prefactor(du, hbar_omega_over_ej);
  return omega_ratio(i_b) / (2.0 * std::numbers::pi) * a_q *
         std::exp(-(du / theta) * (1.0 + 0.87 / quality_q));
}

/// Switching-current density on a grid, plus its distribution function.
struct AnalyticScd {
  std::vector<double> grid;
  std::vector<double> density;
  std::vector<double> cdf;  // probability of switching at or below grid[k]

  /// Probability mass that has not switched by the end of the grid.
  double survival() const { return cdf.empty() ? 1.0 : 1.0 - cdf.back(); }
};

/// Kurkijarvi-Fulton-Dunkleberger density
///   P(i) = (Gamma(i) / v) exp[-(1/v) int_0^i Gamma(i') di'].
///
/// The survival integral is a cumulative trapezoid on the caller's grid,
/// starting from grid[0]. The density is scaled so that its trapezoid mass
/// equals the switching probability 1 - exp(-H_end / v) accumulated on the
/// grid, which keeps it at or below one whatever the resolution.
template <std::invocable<double> RateFn>
AnalyticScd analytic_scd(RateFn&& rate_fn, double v, std::span<const double> grid) {
  if (!(v > 0.0)) throw std::domain_error("analytic_scd: sweep rate must be > 0");
  if (grid.size() < 2) throw std::domain_error("analytic_scd: grid needs >= 2 points");
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!(grid[k] >= 0.0 && grid[k] <= 1.0)) {
      throw std::domain_error("analytic_scd: grid must lie in [0, 1]");
    }
    if (k > 0 && !(grid[k] > grid[k - 1])) {
      throw std::domain_error("analytic_scd: grid must be strictly increasing");
    }
  }

  const std::size_t n = grid.size();
  std::vector<double> rate(n);
  for (std::size_t k = 0; k < n; ++k) {
    rate[k] = static_cast<double>(rate_fn(grid[k]));
    if (!(rate[k] >= 0.0)) {
      throw std::domain_error("analytic_scd: rate function returned a negative value at i = " +
                              std::to_string(grid[k]));
    }
  }

  AnalyticScd out;
  out.grid.assign(grid.begin(), grid.end());
  out.density.resize(n);
  out.cdf.resize(n);
  double integral = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (k > 0) integral += 0.5 * (rate[k] + rate[k - 1]) * (grid[k] - grid[k - 1]);
    const double survival = std::exp(-integral / v);
    out.density[k] = rate[k] / v * survival;
    out.cdf[k] = -std::expm1(-integral / v);
  }

  double mass = 0.0;
  for (std::size_t k = 1; k < n; ++k) {
    mass += 0.5 * (out.density[k] + out.density[k - 1]) * (grid[k] - grid[k - 1]);
  }
  if (mass > 0.0) {
    const double scale = out.cdf.back() / mass;
    for (double& p : out.density) p *= scale;
  }
  return out;
}

/// Uniform grid of `n` points on [lo, hi].
inline std::vector<double> uniform_grid(double lo, double hi, std::size_t n = 4096) {
  if (n < 2 || !(hi > lo)) throw std::domain_error("uniform_grid: need n >= 2 and hi > lo");
  std::vector<double> g(n);
  for (std::size_t k = 0; k < n; ++k) {
    g[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
  }
  g.back() = hi;
  return g;
}

}  // namespace jtd::washboard
