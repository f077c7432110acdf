#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "jtd/langevin.hpp"
#include "jtd/rng.hpp"

namespace jtd {

struct EnsembleSpec {
  std::size_t n_runs = 10000;
  std::uint64_t master_seed = 1;
  JunctionConfig config;
  DriveSpec drive;

  void validate() const {
    if (n_runs < 1) throw std::invalid_argument("n_runs must be >= 1");
    config.validate();
    drive.validate();
  }
};

/// Uniform-width histogram. Bins are [e_k, e_{k+1}) except the last, which
/// also takes values equal to the upper edge.
struct Histogram {
  std::vector<double> edges;
  std::vector<std::size_t> counts;
  std::size_t underflow = 0;
  std::size_t overflow = 0;

  std::size_t total() const {
    std::size_t s = 0;
    for (auto c : counts) s += c;
    return s;
  }
};

inline Histogram histogram(std::span<const double> samples, std::size_t n_bins, double lo,
                           double hi) {
  if (n_bins < 1) throw std::invalid_argument("histogram: n_bins must be >= 1");
  if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw std::invalid_argument("histogram: empty or non-finite range");
  }
  Histogram h;
  h.edges.resize(n_bins + 1);
  for (std::size_t k = 0; k <= n_bins; ++k) {
    h.edges[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n_bins);
  }
  h.edges.back() = hi;
  h.counts.assign(n_bins, 0);
  for (double x : samples) {
    if (x < lo || std::isnan(x)) {
      ++h.underflow;
    } else if (x > hi) {
      ++h.overflow;
    } else if (x == hi) {
      ++h.counts.back();
    } else {
      const auto it = std::upper_bound(h.edges.begin(), h.edges.end(), x);
      ++h.counts[static_cast<std::size_t>(it - h.edges.begin()) - 1];
    }
  }
  return h;
}

/// Bin width of SCD histograms: 200 bins across the [0.8, 1.02] plotting window.
inline constexpr double kScdBinWidth = (1.02 - 0.8) / 200.0;

/// Empirical switching-current distribution.
struct Scd {
  std::vector<double> samples;       // i_sw of switched runs, by trajectory index
  std::vector<std::uint64_t> indices;  // trajectory index of each sample
  std::size_t n_runs = 0;
  std::size_t n_unswitched = 0;
  Histogram hist;  // spans [0, ~i_b_max], so it holds every sample
};

/// Number of local maxima of a histogram whose prominence exceeds `n_sigma`
/// times the Poisson error of the peak-to-base difference.
///
/// Prominence follows the usual topographic rule: walk from the peak in each
/// direction until a taller bin or the end, take the lowest bin on each walk,
/// and measure the peak against the higher of the two. Of two equal peaks the
/// left one counts as taller, so a noisy flat top is one mode, not two.
inline std::size_t count_modes(std::span<const std::size_t> counts, double n_sigma = 3.0) {
  const std::size_t n = counts.size();
  std::size_t modes = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t h = counts[k];
    if (h == 0 || (k > 0 && counts[k - 1] >= h)) continue;
    std::size_t last = k;  // plateaus count once
    while (last + 1 < n && counts[last + 1] == h) ++last;
    if (last + 1 < n && counts[last + 1] > h) continue;

    std::size_t left_base = h;
    for (std::size_t j = k; j-- > 0 && counts[j] < h;) left_base = std::min(left_base, counts[j]);
    if (k == 0) left_base = 0;
    std::size_t right_base = h;
    for (std::size_t j = last + 1; j < n && counts[j] <= h; ++j) {
      right_base = std::min(right_base, counts[j]);
    }
    if (last + 1 == n) right_base = 0;

    const std::size_t base = std::max(left_base, right_base);
    const double prominence = static_cast<double>(h - base);
    const double noise = std::sqrt(static_cast<double>(h + base));
    if (prominence > n_sigma * noise) ++modes;
  }
  return modes;
}

/// Worker count from JTD_THREADS, else the hardware concurrency.
inline unsigned default_thread_count() {
  if (const char* env = std::getenv("JTD_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && n > 0) return static_cast<unsigned>(n);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

struct RunOptions {
  unsigned threads = 0;  // 0: default_thread_count()
  double bin_width = kScdBinWidth;
};

/// Runs every trajectory of the ensemble and returns the raw events in
/// trajectory order. Trajectory k draws from derive_seed(master_seed, k).
inline std::vector<SwitchingEvent> simulate_events(const EnsembleSpec& spec,
                                                   unsigned threads = 0) {
  spec.validate();
  const DriveSpec drive = spec.drive.resolved();
  const std::size_t n = spec.n_runs;
  std::vector<SwitchingEvent> events(n);

  const std::size_t n_blocks = (n + kLanes - 1) / kLanes;
  std::atomic<std::size_t> next_block{0};
  std::atomic<bool> failed{false};
  std::mutex error_mutex;
  std::optional<NumericError> first_error;
  std::exception_ptr other_error;

  auto worker = [&] {
    std::array<NoiseStream, kLanes> streams;
    while (!failed.load(std::memory_order_relaxed)) {
      const std::size_t b = next_block.fetch_add(1, std::memory_order_relaxed);
      if (b >= n_blocks) return;
      const std::size_t first = b * kLanes;
      const std::size_t count = std::min(kLanes, n - first);
      for (std::size_t l = 0; l < count; ++l) {
        streams[l].reseed(derive_seed(spec.master_seed, first + l));
      }
      try {
        integrate_lanes(spec.config, drive, std::span(streams.data(), count),
                        std::span(events.data() + first, count), first);
      } catch (const NumericError& e) {
        std::lock_guard lock(error_mutex);
        if (!first_error || e.trajectory() < first_error->trajectory()) first_error = e;
        failed = true;
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!other_error) other_error = std::current_exception();
        failed = true;
      }
    }
  };

  const unsigned workers =
      std::max(1u, std::min<unsigned>(threads ? threads : default_thread_count(),
                                      static_cast<unsigned>(n_blocks)));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  // Lower-index blocks are always claimed first, so the smallest failing
  // trajectory is deterministic.
  if (first_error) throw *first_error;
  if (other_error) std::rethrow_exception(other_error);
  return events;
}

/// Builds an SCD from raw events. The histogram covers [0, i_b_max] with
/// `bin_width` wide bins, rounded up to whole bins.
inline Scd make_scd(std::span<const SwitchingEvent> events, double i_b_max,
                    double bin_width = kScdBinWidth) {
  if (!(bin_width > 0.0)) throw std::invalid_argument("bin_width must be > 0");
  Scd scd;
  scd.n_runs = events.size();
  scd.samples.reserve(events.size());
  scd.indices.reserve(events.size());
  for (std::size_t k = 0; k < events.size(); ++k) {
    if (events[k].switched) {
      scd.samples.push_back(events[k].i_sw);
      scd.indices.push_back(k);
    } else {
      ++scd.n_unswitched;
    }
  }
  const auto n_bins = static_cast<std::size_t>(std::ceil(i_b_max / bin_width - 1e-9));
  scd.hist = histogram(scd.samples, std::max<std::size_t>(n_bins, 1), 0.0,
                       static_cast<double>(std::max<std::size_t>(n_bins, 1)) * bin_width);
  return scd;
}

inline Scd run_ensemble(const EnsembleSpec& spec, const RunOptions& options = {}) {
  const auto events = simulate_events(spec, options.threads);
  return make_scd(events, spec.config.i_b_max, options.bin_width);
}

}  // namespace jtd
