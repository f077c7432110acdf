#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <type_traits>
#include <variant>

namespace jtd {

struct NoSignal {};

/// i_s(tau) = amplitude * sin(omega * tau).
struct ContinuousWave {
  double amplitude = 1e-3;  // units of I_c
  double omega = 1.0;       // units of omega_J
};

/// Gaussian microwave pulse carrying `n_photons` photons:
///   i_s(tau) = sqrt(N) i_ph exp(-((tau - tau_d) / tau_ph)^2 / 2) cos(omega (tau - tau_d)).
struct PhotonPulse {
  double n_photons = 1.0;
  double amplitude = 0.005;  // single-photon amplitude i_ph, units of I_c
  double omega = 1.0;
  double width = 356.0;      // tau_ph, units of 1 / omega_J
  // Arrival time tau_d. Unset means half a ramp, 1 / (2 v).
  std::optional<double> arrival;
};

using Signal = std::variant<NoSignal, ContinuousWave, PhotonPulse>;

/// Beyond this many widths the envelope underflows to exactly zero.
inline constexpr double kPulseCutoffWidths = 40.0;

inline double signal_current(const NoSignal&, double) noexcept { return 0.0; }

inline double signal_current(const ContinuousWave& s, double tau) noexcept {
  return s.amplitude * std::sin(s.omega * tau);
}

inline double signal_current(const PhotonPulse& s, double tau) {
  if (!s.arrival) throw std::invalid_argument("photon pulse has no arrival time");
  const double x = (tau - *s.arrival) / s.width;
  if (std::abs(x) > kPulseCutoffWidths) return 0.0;
  return std::sqrt(s.n_photons) * s.amplitude * std::exp(-0.5 * x * x) *
         std::cos(s.omega * (tau - *s.arrival));
}

inline double signal_current(const Signal& s, double tau) {
  return std::visit([tau](const auto& alt) { return signal_current(alt, tau); }, s);
}

/// Signal strength as swept by amplitude scans: the CW amplitude or the
/// photon number of a pulse.
inline double signal_strength(const Signal& s) {
  if (const auto* cw = std::get_if<ContinuousWave>(&s)) return cw->amplitude;
  if (const auto* p = std::get_if<PhotonPulse>(&s)) return p->n_photons;
  return 0.0;
}

inline Signal with_strength(Signal s, double strength) {
  if (auto* cw = std::get_if<ContinuousWave>(&s)) {
    cw->amplitude = strength;
  } else if (auto* p = std::get_if<PhotonPulse>(&s)) {
    p->n_photons = strength;
  } else if (strength != 0.0) {
    throw std::invalid_argument("cannot set a nonzero strength on an empty signal");
  }
  return s;
}

inline Signal with_frequency(Signal s, double omega) {
  if (auto* cw = std::get_if<ContinuousWave>(&s)) {
    cw->omega = omega;
  } else if (auto* p = std::get_if<PhotonPulse>(&s)) {
    p->omega = omega;
  } else {
    throw std::invalid_argument("cannot set a frequency on an empty signal");
  }
  return s;
}

inline bool has_signal(const Signal& s) noexcept {
  return !std::holds_alternative<NoSignal>(s);
}

/// Linear bias ramp i_b(tau) = v tau plus an optional microwave signal.
struct DriveSpec {
  double v = 2e-5;
  Signal signal = NoSignal{};

  static DriveSpec from_kappa(double kappa, double beta, Signal signal = NoSignal{}) {
    return DriveSpec{kappa * beta, std::move(signal)};
  }

  double kappa(double beta) const { return v / beta; }

  /// Copy with every defaulted signal parameter made explicit.
  DriveSpec resolved() const {
    DriveSpec out = *this;
    if (auto* p = std::get_if<PhotonPulse>(&out.signal); p && !p->arrival) {
      if (!(v > 0.0)) {
        throw std::invalid_argument("pulse arrival defaults to 1/(2v) and needs v > 0");
      }
      p->arrival = 1.0 / (2.0 * v);
    }
    return out;
  }

  void validate() const {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument("sweep rate v must be finite and >= 0");
    }
    if (const auto* p = std::get_if<PhotonPulse>(&signal)) {
      if (!(p->n_photons >= 0.0)) throw std::invalid_argument("n_photons must be >= 0");
      if (!(p->width > 0.0)) throw std::invalid_argument("pulse width must be > 0");
    }
  }
};

}  // namespace jtd
