#pragma once

// Noisy, driven RCSJ phase dynamics
//   phi'' + beta phi' + sin(phi) = v tau + i_n(tau) + i_s(tau),
// with <i_n(tau) i_n(tau')> = D delta(tau - tau').
//
// Discretisation: damped leapfrog with the velocity held at half steps,
//   p_{n+1/2} = [(1 - beta dt/2) p_{n-1/2} + dt F(phi_n, tau_n) + sqrt(D dt) xi_n]
//               / (1 + beta dt/2)
//   phi_{n+1} = phi_n + dt p_{n+1/2}
// where xi_n is standard normal. The noise enters as a Gaussian impulse whose
// per-step acceleration has variance D / dt.

#include <array>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>

#include "jtd/drive.hpp"
#include "jtd/rng.hpp"

namespace jtd {

enum class EscapeCriterion {
  fixed_threshold,  // phi > phi_esc
  barrier_top,      // phi > pi - arcsin(i_b), the running local maximum
};

struct JunctionConfig {
  double beta = 1e-4;
  double noise_intensity = 1e-7;  // D = 2 beta k_B T / E_J0
  double phi0 = 0.1;
  double phi_dot0 = 0.0;
  double dt = 0.02;
  double phi_esc = std::numbers::pi / 2.0;
  double i_b_max = 1.05;
  EscapeCriterion escape = EscapeCriterion::fixed_threshold;
  // Step guard. Zero derives it from the ramp, ceil(i_b_max / (v dt)) + 1.
  std::uint64_t max_steps = 0;

  bool operator==(const JunctionConfig&) const = default;

  /// k_B T / E_J0 implied by the noise intensity.
  double theta() const { return noise_intensity / (2.0 * beta); }

  void validate() const {
    if (!(beta >= 0.0) || !std::isfinite(beta)) throw std::invalid_argument("beta must be >= 0");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("dt must be > 0");
    if (!(noise_intensity >= 0.0) || !std::isfinite(noise_intensity)) {
      throw std::invalid_argument("noise_intensity must be >= 0");
    }
    if (!std::isfinite(phi0) || !std::isfinite(phi_dot0)) {
      throw std::invalid_argument("initial state must be finite");
    }
    if (escape == EscapeCriterion::fixed_threshold && !(phi_esc > phi0)) {
      throw std::invalid_argument("phi_esc must exceed phi0");
    }
    if (!(i_b_max > 0.0 && i_b_max <= 1.2)) {
      throw std::invalid_argument("i_b_max must lie in (0, 1.2]");
    }
  }
};

/// Outcome of one ramp. i_sw and tau_sw are NaN when the junction did not switch.
struct SwitchingEvent {
  bool switched = false;
  double i_sw = std::numeric_limits<double>::quiet_NaN();
  double tau_sw = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t steps = 0;
};

/// A trajectory produced a non-finite state.
class NumericError : public std::runtime_error {
 public:
  NumericError(std::uint64_t trajectory, std::uint64_t step)
      : std::runtime_error("langevin: non-finite state in trajectory " +
                           std::to_string(trajectory) + " at step " + std::to_string(step)),
        trajectory_(trajectory),
        step_(step) {}

  std::uint64_t trajectory() const noexcept { return trajectory_; }
  std::uint64_t step() const noexcept { return step_; }

 private:
  std::uint64_t trajectory_;
  std::uint64_t step_;
};

/// State handed to trajectory observers after every step (and once for the
/// initial state, step 0). phi_dot is the half-step velocity p_{n-1/2}.
struct TrajectoryPoint {
  std::uint64_t step;
  double tau;
  double phi;
  double phi_dot;
  double i_b;
};

namespace detail {

struct StepCoefficients {
  double dt;
  double v;
  double decay;
  double gain;
  double sigma;

  StepCoefficients(const JunctionConfig& c, double sweep_rate)
      : dt(c.dt),
        v(sweep_rate),
        decay(1.0 - 0.5 * c.beta * c.dt),
        gain(1.0 / (1.0 + 0.5 * c.beta * c.dt)),
        sigma(std::sqrt(c.noise_intensity * c.dt)) {}
};

inline void advance(const StepCoefficients& k, double bias, double source, double xi,
                    double& phi, double& phi_dot) noexcept {
  const double force = bias + source - std::sin(phi);
  phi_dot = (k.decay * phi_dot + k.dt * force + k.sigma * xi) * k.gain;
  phi += k.dt * phi_dot;
}

inline double escape_threshold(const JunctionConfig& c, double i_b) noexcept {
  if (c.escape == EscapeCriterion::fixed_threshold) return c.phi_esc;
  if (i_b >= 1.0) return std::numbers::pi / 2.0;
  return std::numbers::pi - std::asin(i_b < 0.0 ? 0.0 : i_b);
}

inline std::uint64_t step_guard(const JunctionConfig& c, double v) {
  if (c.max_steps > 0) return c.max_steps;
  if (!(v > 0.0)) {
    throw std::invalid_argument("max_steps must be set when the sweep rate is zero");
  }
  const double n = std::ceil(c.i_b_max / (v * c.dt));
  if (!(n < 9.0e18)) throw std::invalid_argument("ramp needs too many steps");
  return static_cast<std::uint64_t>(n) + 1;
}

enum class StepVerdict { running, switched, exhausted };

inline StepVerdict judge(const JunctionConfig& c, std::uint64_t step, std::uint64_t guard,
                         double i_b, double phi) noexcept {
  if (i_b > c.i_b_max) return StepVerdict::exhausted;
  if (phi > escape_threshold(c, i_b)) return StepVerdict::switched;
  if (step >= guard) return StepVerdict::exhausted;
  return StepVerdict::running;
}

inline SwitchingEvent make_event(StepVerdict verdict, std::uint64_t step, double tau,
                                 double i_b) {
  SwitchingEvent e;
  e.steps = step;
  if (verdict == StepVerdict::switched) {
    e.switched = true;
    e.i_sw = i_b;
    e.tau_sw = tau;
  }
  return e;
}

/// Visit the drive's signal once and hand back a plain callable source.
template <class Fn>
decltype(auto) with_source(const DriveSpec& resolved, Fn&& fn) {
  return std::visit(
      [&](const auto& alt) -> decltype(auto) {
        return fn([&alt](double tau) { return signal_current(alt, tau); });
      },
      resolved.signal);
}

}  // namespace detail

/// Integrates one trajectory from tau = 0 until it switches or the ramp
/// reaches i_b_max. `observe` is called with every TrajectoryPoint.
template <std::invocable<const TrajectoryPoint&> Observer>
SwitchingEvent integrate(const JunctionConfig& config, const DriveSpec& drive,
                         NoiseStream& noise, Observer&& observe,
                         std::uint64_t trajectory_index = 0) {
  config.validate();
  drive.validate();
  const DriveSpec d = drive.resolved();
  const detail::StepCoefficients k(config, d.v);
  const std::uint64_t guard = detail::step_guard(config, d.v);
  const bool noisy = k.sigma > 0.0;

  return detail::with_source(d, [&](auto source) {
    double phi = config.phi0;
    double phi_dot = config.phi_dot0;
    observe(TrajectoryPoint{0, 0.0, phi, phi_dot, 0.0});
    for (std::uint64_t n = 0;; ++n) {
      const double tau = static_cast<double>(n) * k.dt;
      const double xi = noisy ? noise() : 0.0;
      detail::advance(k, k.v * tau, source(tau), xi, phi, phi_dot);

      const std::uint64_t step = n + 1;
      const double tau_next = static_cast<double>(step) * k.dt;
      const double i_b = k.v * tau_next;
      if (!std::isfinite(phi) || !std::isfinite(phi_dot)) {
        throw NumericError(trajectory_index, step);
      }
      observe(TrajectoryPoint{step, tau_next, phi, phi_dot, i_b});
      const auto verdict = detail::judge(config, step, guard, i_b, phi);
      if (verdict != detail::StepVerdict::running) {
        return detail::make_event(verdict, step, tau_next, i_b);
      }
    }
  });
}

inline SwitchingEvent integrate(const JunctionConfig& config, const DriveSpec& drive,
                                NoiseStream& noise, std::uint64_t trajectory_index = 0) {
  return integrate(config, drive, noise, [](const TrajectoryPoint&) {}, trajectory_index);
}

/// Number of trajectories advanced in lockstep by integrate_lanes. Independent
/// lanes hide the latency of the sin/normal dependency chain.
inline constexpr std::size_t kLanes = 8;

/// Integrates up to kLanes trajectories in lockstep, lane l drawing from
/// streams[l] and reporting as trajectory first_index + l. Each lane performs
/// exactly the arithmetic of integrate(), so results are bit-identical.
inline void integrate_lanes(const JunctionConfig& config, const DriveSpec& resolved,
                            std::span<NoiseStream> streams, std::span<SwitchingEvent> out,
                            std::uint64_t first_index) {
  const std::size_t count = streams.size();
  if (count == 0) return;
  if (count > kLanes || out.size() != count) {
    throw std::invalid_argument("integrate_lanes: bad lane count");
  }
  const detail::StepCoefficients k(config, resolved.v);
  const std::uint64_t guard = detail::step_guard(config, resolved.v);
  const bool noisy = k.sigma > 0.0;

  detail::with_source(resolved, [&](auto source) {
    std::array<double, kLanes> phi{};
    std::array<double, kLanes> phi_dot{};
    std::array<double, kLanes> xi{};
    std::array<bool, kLanes> active{};
    for (std::size_t l = 0; l < count; ++l) {
      phi[l] = config.phi0;
      phi_dot[l] = config.phi_dot0;
      active[l] = true;
    }
    std::size_t remaining = count;
    constexpr double lowest = std::numeric_limits<double>::lowest();

    for (std::uint64_t n = 0; remaining > 0; ++n) {
      const double tau = static_cast<double>(n) * k.dt;
      const double bias = k.v * tau;
      const double src = source(tau);
      if (noisy) {
        for (std::size_t l = 0; l < count; ++l) xi[l] = active[l] ? streams[l]() : 0.0;
      }
      for (std::size_t l = 0; l < kLanes; ++l) {
        detail::advance(k, bias, src, xi[l], phi[l], phi_dot[l]);
      }

      const std::uint64_t step = n + 1;
      const double tau_next = static_cast<double>(step) * k.dt;
      const double i_b = k.v * tau_next;
      const bool exhausted = i_b > config.i_b_max || step >= guard;
      const double threshold = detail::escape_threshold(config, i_b);

      // One compare per lane catches escapes and non-finite phases alike.
      bool flagged = false;
      for (std::size_t l = 0; l < kLanes; ++l) {
        flagged |= !(phi[l] <= threshold && phi[l] >= lowest);
      }
      if (!flagged && !exhausted) continue;

      for (std::size_t l = 0; l < kLanes; ++l) {
        if (!active[l]) {
          // Park finished and padding lanes so they stay cheap to advance.
          phi[l] = 0.0;
          phi_dot[l] = 0.0;
          continue;
        }
        if (!std::isfinite(phi[l]) || !std::isfinite(phi_dot[l])) {
          throw NumericError(first_index + l, step);
        }
        const auto verdict = detail::judge(config, step, guard, i_b, phi[l]);
        if (verdict != detail::StepVerdict::running) {
          out[l] = detail::make_event(verdict, step, tau_next, i_b);
          active[l] = false;
          --remaining;
        }
      }
    }
    return 0;
  });
}

}  // namespace jtd
