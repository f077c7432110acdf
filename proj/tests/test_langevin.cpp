#include <cmath>
#include <cstring>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "jtd/langevin.hpp"

using namespace jtd;
using std::numbers::pi;

namespace {

JunctionConfig noiseless(double phi0 = 0.1) {
  JunctionConfig c;
  c.noise_intensity = 0.0;
  c.phi0 = phi0;
  return c;
}

SwitchingEvent run(const JunctionConfig& c, const DriveSpec& d, std::uint64_t seed = 1) {
  NoiseStream s(seed);
  return integrate(c, d, s);
}

}  // namespace

TEST(SignalCurrent, Examples) {
  EXPECT_EQ(signal_current(Signal{NoSignal{}}, 123.4), 0.0);
  EXPECT_DOUBLE_EQ(signal_current(Signal{ContinuousWave{0.001, 1.0}}, pi / 2), 0.001);
  PhotonPulse p;
  p.n_photons = 4;
  p.amplitude = 0.005;
  p.arrival = 1000.0;
  EXPECT_DOUBLE_EQ(signal_current(Signal{p}, 1000.0), 0.01);
}

TEST(SignalCurrent, PulseEnvelopeAndCutoff) {
  PhotonPulse p;
  p.n_photons = 1;
  p.width = 10.0;
  p.omega = 0.0;
  p.arrival = 100.0;
  EXPECT_NEAR(signal_current(Signal{p}, 110.0), 0.005 * std::exp(-0.5), 1e-18);
  EXPECT_EQ(signal_current(Signal{p}, 100.0 + 10.0 * (kPulseCutoffWidths + 1)), 0.0);
  PhotonPulse unset;
  EXPECT_THROW(signal_current(Signal{unset}, 0.0), std::invalid_argument);
}

TEST(DriveSpec, KappaAndArrival) {
  const auto d = DriveSpec::from_kappa(5.0, 1e-4, PhotonPulse{});
  EXPECT_DOUBLE_EQ(d.v, 5e-4);
  EXPECT_DOUBLE_EQ(d.kappa(1e-4), 5.0);
  const auto r = d.resolved();
  EXPECT_DOUBLE_EQ(*std::get<PhotonPulse>(r.signal).arrival, 1.0 / (2.0 * 5e-4));
  PhotonPulse fixed;
  fixed.arrival = 3.0;
  EXPECT_EQ(*std::get<PhotonPulse>(DriveSpec{1e-5, fixed}.resolved().signal).arrival, 3.0);
}

TEST(DriveSpec, Validation) {
  EXPECT_THROW(DriveSpec{-1e-5}.validate(), std::invalid_argument);
  PhotonPulse p;
  p.n_photons = -1;
  EXPECT_THROW((DriveSpec{1e-5, p}.validate()), std::invalid_argument);
  p.n_photons = 1;
  p.width = 0.0;
  EXPECT_THROW((DriveSpec{1e-5, p}.validate()), std::invalid_argument);
  EXPECT_THROW(with_strength(NoSignal{}, 1.0), std::invalid_argument);
  EXPECT_NO_THROW(with_strength(NoSignal{}, 0.0));
  EXPECT_THROW(with_frequency(NoSignal{}, 1.0), std::invalid_argument);
}

TEST(JunctionConfig, Validation) {
  JunctionConfig c;
  EXPECT_NO_THROW(c.validate());
  c.phi_esc = c.phi0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.dt = 0.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.i_b_max = 1.3;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.noise_intensity = -1.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  EXPECT_DOUBLE_EQ(c.theta(), 5e-4);
}

TEST(Integrate, AdiabaticSwitchingIndependentOfInitialPhase) {
  std::vector<double> isw;
  for (double phi0 : {0.1, 0.2, 0.3}) {
    const auto e = run(noiseless(phi0), DriveSpec{1e-6});
    ASSERT_TRUE(e.switched);
    EXPECT_NEAR(e.i_sw, 1.0, 0.005);
    isw.push_back(e.i_sw);
  }
  EXPECT_LT(std::abs(isw[0] - isw[2]), 1e-3);
  EXPECT_LT(std::abs(isw[0] - isw[1]), 1e-3);
}

TEST(Integrate, FastRampDependsOnInitialPhase) {
  const auto a = run(noiseless(0.1), DriveSpec{5e-4});
  const auto b = run(noiseless(0.3), DriveSpec{5e-4});
  ASSERT_TRUE(a.switched && b.switched);
  EXPECT_GT(std::abs(a.i_sw - b.i_sw), 0.01);
}

TEST(Integrate, ZeroRampNeverSwitches) {
  auto c = noiseless();
  c.max_steps = 20000;
  const auto e = run(c, DriveSpec{0.0});
  EXPECT_FALSE(e.switched);
  EXPECT_EQ(e.steps, 20000u);
  EXPECT_TRUE(std::isnan(e.i_sw));
  EXPECT_TRUE(std::isnan(e.tau_sw));
  c.max_steps = 0;
  EXPECT_THROW(run(c, DriveSpec{0.0}), std::invalid_argument);
}

TEST(Integrate, EventInvariants) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const DriveSpec d{5e-4};
    const auto e = run(JunctionConfig{}, d, seed);
    ASSERT_TRUE(e.switched);
    EXPECT_GT(e.i_sw, 0.0);
    EXPECT_LE(e.i_sw, 1.05);
    EXPECT_NEAR(e.tau_sw, e.i_sw / d.v, 0.02 * d.v + 1e-9);
    EXPECT_DOUBLE_EQ(e.tau_sw, static_cast<double>(e.steps) * 0.02);
  }
}

TEST(Integrate, RampCapReportsUnswitched) {
  auto c = noiseless();
  c.i_b_max = 0.5;
  const auto e = run(c, DriveSpec{1e-3});
  EXPECT_FALSE(e.switched);
  // Guard is ceil(0.5 / (1e-3 * 0.02)) + 1 steps; the cap trips first.
  EXPECT_LE(e.steps, 25001u);
  EXPECT_GT(1e-3 * 0.02 * static_cast<double>(e.steps), 0.5);
}

TEST(Integrate, Deterministic) {
  JunctionConfig c;
  const DriveSpec d{2e-4, ContinuousWave{1e-3, 1.0}};
  const auto a = run(c, d, 42);
  const auto b = run(c, d, 42);
  EXPECT_EQ(a.switched, b.switched);
  EXPECT_EQ(a.i_sw, b.i_sw);
  EXPECT_EQ(a.tau_sw, b.tau_sw);
  EXPECT_EQ(a.steps, b.steps);
  EXPECT_NE(run(c, d, 43).steps, a.steps);
}

TEST(Integrate, ObserverSeesEveryStep) {
  std::uint64_t expected = 0;
  double last_ib = -1.0;
  const auto e = [&] {
    NoiseStream s(5);
    return integrate(JunctionConfig{}, DriveSpec{5e-4}, s, [&](const TrajectoryPoint& p) {
      EXPECT_EQ(p.step, expected++);
      EXPECT_DOUBLE_EQ(p.tau, static_cast<double>(p.step) * 0.02);
      last_ib = p.i_b;
    });
  }();
  EXPECT_EQ(expected, e.steps + 1);
  EXPECT_EQ(last_ib, e.i_sw);
}

TEST(Integrate, NumericErrorReportsStep) {
  PhotonPulse p;
  p.n_photons = 1e308;
  p.amplitude = 1e308;
  p.arrival = 0.0;
  NoiseStream s(1);
  try {
    integrate(noiseless(), DriveSpec{1e-3, p}, s, 17);
    FAIL() << "expected NumericError";
  } catch (const NumericError& e) {
    EXPECT_EQ(e.trajectory(), 17u);
    EXPECT_EQ(e.step(), 1u);
  }
}

TEST(Integrate, BarrierTopCriterion) {
  auto c = noiseless();
  c.escape = EscapeCriterion::barrier_top;
  const auto e = run(c, DriveSpec{1e-5});
  ASSERT_TRUE(e.switched);
  EXPECT_NEAR(e.i_sw, 1.0, 0.005);
}

TEST(Lanes, BitIdenticalToSingleTrajectories) {
  struct Case {
    DriveSpec drive;
    std::size_t count;
  };
  PhotonPulse pulse;
  pulse.n_photons = 4;
  const std::vector<Case> cases{{DriveSpec{5e-4}, kLanes},
                                {DriveSpec{5e-4}, 3},
                                {DriveSpec{2e-4, ContinuousWave{1e-3, 1.0}}, kLanes},
                                {DriveSpec{8.6e-4, pulse}, 5}};
  JunctionConfig c;
  c.phi0 = 0.05;
  for (const auto& k : cases) {
    const auto resolved = k.drive.resolved();
    std::vector<NoiseStream> streams(k.count);
    for (std::size_t l = 0; l < k.count; ++l) streams[l].reseed(derive_seed(9, 100 + l));
    std::vector<SwitchingEvent> out(k.count);
    integrate_lanes(c, resolved, streams, out, 100);
    for (std::size_t l = 0; l < k.count; ++l) {
      NoiseStream s(derive_seed(9, 100 + l));
      const auto e = integrate(c, k.drive, s);
      EXPECT_EQ(out[l].switched, e.switched);
      EXPECT_EQ(out[l].steps, e.steps);
      EXPECT_EQ(std::memcmp(&out[l].i_sw, &e.i_sw, sizeof(double)), 0);
    }
  }
}

TEST(Lanes, RejectsBadCounts) {
  std::vector<NoiseStream> streams(kLanes + 1);
  std::vector<SwitchingEvent> out(kLanes + 1);
  EXPECT_THROW(integrate_lanes(JunctionConfig{}, DriveSpec{}, streams, out, 0),
               std::invalid_argument);
}

TEST(Properties, DiscreteEnergyNeverIncreases) {
  // E_n = p_{n-1/2} p_{n+1/2} / 2 + 1 - cos(phi_n), the energy the damped
  // leapfrog dissipates. Consecutive observer points carry p_{n-1/2} and
  // p_{n+1/2}.
  auto c = noiseless(0.1);
  c.max_steps = 200000;
  std::vector<double> phi, p;
  NoiseStream s(1);
  integrate(c, DriveSpec{0.0}, s, [&](const TrajectoryPoint& pt) {
    phi.push_back(pt.phi);
    p.push_back(pt.phi_dot);
  });
  double prev = p[0] * p[1] / 2 + 1 - std::cos(phi[0]);
  const double first = prev;
  for (std::size_t n = 1; n + 1 < phi.size(); ++n) {
    const double e = p[n] * p[n + 1] / 2 + 1 - std::cos(phi[n]);
    ASSERT_LE(e - prev, 1e-8 * c.dt) << "step " << n;
    prev = e;
  }
  EXPECT_LT(prev, first);
}

TEST(Properties, TimeStepConvergence) {
  auto c = noiseless(0.1);
  const auto coarse = run(c, DriveSpec{1e-5});
  c.dt = 0.01;
  const auto fine = run(c, DriveSpec{1e-5});
  ASSERT_TRUE(coarse.switched && fine.switched);
  EXPECT_LT(std::abs(coarse.i_sw - fine.i_sw), 1e-3);
}

TEST(Properties, SmallOscillationPeriodIsTwoPi) {
  auto c = noiseless(1e-3);
  c.beta = 0.0;
  c.dt = 0.002;
  c.max_steps = static_cast<std::uint64_t>(12 * 2 * pi / c.dt);
  std::vector<double> up;  // upward zero crossings, linearly interpolated
  double prev_phi = c.phi0, prev_tau = 0.0;
  NoiseStream s(1);
  integrate(c, DriveSpec{0.0}, s, [&](const TrajectoryPoint& pt) {
    if (prev_phi < 0.0 && pt.phi >= 0.0) {
      up.push_back(prev_tau + (pt.tau - prev_tau) * (-prev_phi) / (pt.phi - prev_phi));
    }
    prev_phi = pt.phi;
    prev_tau = pt.tau;
  });
  ASSERT_GE(up.size(), 11u);
  const double period = (up[10] - up[0]) / 10.0;
  EXPECT_NEAR(period / (2 * pi), 1.0, 1e-3);
}

TEST(Properties, NoiseIncrementStatistics) {
  // With beta = 0 the update is p' = p + dt F + sqrt(D dt) xi, so the noise
  // acceleration (p' - p)/dt - F has variance D/dt.
  JunctionConfig c;
  c.beta = 0.0;
  c.noise_intensity = 1e-7;
  c.phi0 = 0.1;
  c.max_steps = 1000000;
  std::vector<double> phi, p;
  phi.reserve(c.max_steps + 1);
  p.reserve(c.max_steps + 1);
  NoiseStream s(2024);
  const auto e = integrate(c, DriveSpec{0.0}, s, [&](const TrajectoryPoint& pt) {
    phi.push_back(pt.phi);
    p.push_back(pt.phi_dot);
  });
  ASSERT_FALSE(e.switched);
  const std::size_t n = phi.size() - 1;
  ASSERT_EQ(n, 1000000u);
  double sum = 0.0, sum2 = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double a = (p[k + 1] - p[k]) / c.dt + std::sin(phi[k]);
    sum += a;
    sum2 += a * a;
  }
  const double var_expected = c.noise_intensity / c.dt;
  const double mean = sum / static_cast<double>(n);
  const double var = sum2 / static_cast<double>(n) - mean * mean;
  EXPECT_LT(std::abs(mean), 3.0 * std::sqrt(var_expected / static_cast<double>(n)));
  EXPECT_LT(std::abs(var / var_expected - 1.0), 3.0 * std::sqrt(2.0 / static_cast<double>(n)));
}
