#pragma once

// Command implementations behind the jtd executable. Each command writes
// its artifacts into cfg.output_dir and returns the paths it wrote.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "jtd/config.hpp"
#include "jtd/discriminator.hpp"
#include "jtd/ensemble.hpp"
#include "jtd/io.hpp"
#include "jtd/langevin.hpp"
#include "jtd/protocol.hpp"
#include "jtd/rng.hpp"
#include "jtd/svg.hpp"
#include "jtd/washboard.hpp"

namespace jtd::app {

namespace fs = std::filesystem;
using io::json;

class Artifacts {
 public:
  explicit Artifacts(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

  void text(const std::string& name, const std::string& content) {
    io::write_file(dir_ / name, content);
    written_.push_back(dir_ / name);
  }
  void json_file(const std::string& name, const json& j) { text(name, j.dump(2) + "\n"); }

  const std::vector<fs::path>& written() const { return written_; }

 private:
  fs::path dir_;
  std::vector<fs::path> written_;
};

namespace detail {

inline RunOptions run_options(const ExperimentConfig& cfg) {
  RunOptions o;
  o.threads = cfg.threads;
  return o;
}

inline json base_summary(const ExperimentConfig& cfg) {
  return {{"command", cfg.command}, {"manifest", io::manifest_json(cfg)}};
}

// Histogram counts of `samples` on the plotting window.
inline std::vector<double> window_counts(std::span<const double> samples, const PlotWindow& w) {
  const auto h = histogram(samples, w.bins, w.lo, w.hi);
  return {h.counts.begin(), h.counts.end()};
}

inline std::string scd_plot(const std::vector<std::pair<std::string, const Scd*>>& series,
                            const PlotWindow& w, const std::string& title,
                            const washboard::AnalyticScd* analytic = nullptr) {
  const auto edges = linspace(w.lo, w.hi, w.bins + 1);
  std::vector<std::vector<double>> counts;
  double top = 1.0;
  for (const auto& [name, scd] : series) {
    counts.push_back(window_counts(scd->samples, w));
    top = std::max(top, *std::max_element(counts.back().begin(), counts.back().end()));
  }
  std::vector<double> ax;
  std::vector<double> ay;
  if (analytic && !series.empty()) {
    // Density scaled to expected counts per plotting bin.
    const double scale = static_cast<double>(series.front().second->n_runs) * (w.hi - w.lo) /
                         static_cast<double>(w.bins);
    for (std::size_t k = 0; k < analytic->grid.size(); ++k) {
      if (analytic->grid[k] < w.lo || analytic->grid[k] > w.hi) continue;
      ax.push_back(analytic->grid[k]);
      ay.push_back(analytic->density[k] * scale);
      top = std::max(top, ay.back());
    }
  }
  svg::Chart chart(w.lo, w.hi, 0.0, 1.05 * top);
  chart.title(title).x_label("switching current i_sw / I_c").y_label("counts per bin");
  for (std::size_t k = 0; k < series.size(); ++k) {
    chart.bars(edges, counts[k], series[k].first);
  }
  if (!ax.empty()) chart.line(ax, ay, "thermal-activation density");
  return chart.render();
}

inline std::string roc_plot(const RocResult& roc, const std::string& title) {
  std::vector<double> x;
  std::vector<double> y;
  for (const auto& p : roc.points) {
    x.push_back(p.fpr);
    y.push_back(p.tpr);
  }
  const std::vector<double> diag{0.0, 1.0};
  svg::Chart chart(0.0, 1.0, 0.0, 1.0);
  char label[64];
  std::snprintf(label, sizeof label, "ROC, auc = %.3f", roc.auc);
  chart.title(title).x_label("false positive rate").y_label("true positive rate");
  chart.line(x, y, label).line(diag, diag, "chance");
  return chart.render();
}

inline std::string sweep_plot(const SweepCurve& c, const std::string& x_label,
                              const std::string& title) {
  std::vector<double> x;
  std::vector<double> y;
  for (const auto& p : c.points) {
    x.push_back(p.value);
    y.push_back(p.auc_star);
  }
  double lo = *std::min_element(x.begin(), x.end());
  double hi = *std::max_element(x.begin(), x.end());
  if (!(hi > lo)) {
    lo -= 0.5 * std::max(std::abs(lo), 1e-9);
    hi += 0.5 * std::max(std::abs(hi), 1e-9);
  }
  svg::Chart chart(lo, hi, 0.4, 1.02);
  chart.title(title).x_label(x_label).y_label("auc*");
  chart.line(x, y, "auc*", true).hrule(c.auc_threshold, "detection threshold");
  return chart.render();
}

inline void log_point(std::ostream& log, const std::string& name, const SweepPoint& p) {
  log << name << " = " << io::format_double(p.value) << ": auc* = " << p.auc_star
      << ", auc = " << p.auc_raw << "\n";
  log.flush();
}

inline SweepOptions sweep_options(const ExperimentConfig& cfg, std::ostream& log,
                                  const std::string& name) {
  SweepOptions o;
  o.run = run_options(cfg);
  o.auc_threshold = cfg.auc_threshold;
  o.on_point = [&log, name](std::size_t, const SweepPoint& p) { log_point(log, name, p); };
  return o;
}

}  // namespace detail

inline std::vector<fs::path> cmd_trajectory(const ExperimentConfig& cfg, std::ostream& log) {
  Artifacts out(cfg.output_dir);
  const auto& base = cfg.ensemble;
  std::vector<double> kappas = cfg.trajectory.kappa_values;
  if (kappas.empty()) kappas.push_back(cfg.kappa());
  std::vector<double> phis = cfg.trajectory.phi0_values;
  if (phis.empty()) phis.push_back(base.config.phi0);

  std::string events_csv = "run,kappa,phi0,switched,i_sw,tau_sw,steps\n";
  std::string paths_csv = "run,step,tau,phi,phi_dot,i_b\n";
  json events = json::array();
  const std::uint64_t every = cfg.trajectory.record_every;
  std::uint64_t run = 0;
  std::vector<std::vector<double>> isw(kappas.size());
  for (std::size_t a = 0; a < kappas.size(); ++a) {
    for (double phi0 : phis) {
      JunctionConfig jc = base.config;
      jc.phi0 = phi0;
      DriveSpec drive = base.drive;
      if (!cfg.trajectory.kappa_values.empty()) drive.v = kappas[a] * jc.beta;
      NoiseStream noise(derive_seed(base.master_seed, run));
      auto observer = [&](const TrajectoryPoint& p) {
        if (every == 0 || p.step % every != 0) return;
        paths_csv += std::to_string(run) + "," + std::to_string(p.step) + "," +
                     io::format_double(p.tau) + "," + io::format_double(p.phi) + "," +
                     io::format_double(p.phi_dot) + "," + io::format_double(p.i_b) + "\n";
      };
      const auto e = integrate(jc, drive, noise, observer, run);
      events_csv += std::to_string(run) + "," + io::format_double(kappas[a]) + "," +
                    io::format_double(phi0) + "," + (e.switched ? "1" : "0") + "," +
                    io::format_double(e.i_sw) + "," + io::format_double(e.tau_sw) + "," +
                    std::to_string(e.steps) + "\n";
      events.push_back({{"run", run},
                        {"kappa", kappas[a]},
                        {"phi0", phi0},
                        {"switched", e.switched},
                        {"i_sw", io::number(e.i_sw)},
                        {"tau_sw", io::number(e.tau_sw)},
                        {"steps", e.steps}});
      isw[a].push_back(e.i_sw);
      log << "run " << run << ": kappa = " << kappas[a] << ", phi0 = " << phi0
          << (e.switched ? ", i_sw = " + io::format_double(e.i_sw) : std::string(", no switch"))
          << "\n";
      ++run;
    }
  }
  out.text("trajectory_events.csv", events_csv);
  if (every > 0) out.text("trajectory_paths.csv", paths_csv);
  json summary = detail::base_summary(cfg);
  summary["events"] = events;
  out.json_file("trajectory_summary.json", summary);
  if (cfg.plot && phis.size() > 1) {
    double lo = 2.0;
    double hi = 0.0;
    for (const auto& row : isw) {
      for (double x : row) {
        if (std::isfinite(x)) {
          lo = std::min(lo, x);
          hi = std::max(hi, x);
        }
      }
    }
    if (!(hi > lo)) {
      lo -= 0.01;
      hi += 0.01;
    }
    svg::Chart chart(phis.front(), phis.back() > phis.front() ? phis.back() : phis.front() + 1.0,
                     lo - 0.1 * (hi - lo), hi + 0.1 * (hi - lo));
    chart.title("noiseless switching current").x_label("initial phase phi0").y_label("i_sw");
    for (std::size_t a = 0; a < kappas.size(); ++a) {
      chart.line(phis, isw[a], "kappa = " + svg::tick_label(kappas[a]), true);
    }
    out.text("trajectory.svg", chart.render());
  }
  return out.written();
}

inline std::vector<fs::path> cmd_scd(const ExperimentConfig& cfg, std::ostream& log) {
  Artifacts out(cfg.output_dir);
  const Scd scd = run_ensemble(cfg.ensemble, detail::run_options(cfg));
  out.text("scd_samples.csv", io::scd_csv(scd));
  json summary = detail::base_summary(cfg);
  summary["scd"] = io::scd_json(scd, cfg.ensemble.master_seed);
  std::optional<washboard::AnalyticScd> analytic;
  if (cfg.analytic.enabled) {
    const double theta = cfg.ensemble.config.theta();
    const double a_th = cfg.analytic.a_th;
    const auto grid = washboard::uniform_grid(0.0, 1.0, cfg.analytic.grid_points);
    analytic = washboard::analytic_scd(
        [&](double i) { return theta > 0.0 ? washboard::thermal_rate(i, theta, a_th) : 0.0; },
        cfg.ensemble.drive.v, grid);
    const TabulatedCdf cdf(analytic->grid, analytic->cdf);
    json a = {{"a_th", a_th}, {"theta", theta}, {"survival", analytic->survival()}};
    a["ks_distance"] = scd.samples.empty() ? json(nullptr) : json(ks_distance(scd.samples, cdf));
    summary["analytic"] = a;
  }
  out.json_file("scd_summary.json", summary);
  if (cfg.plot) {
    out.text("scd_hist.svg",
             detail::scd_plot({{"simulated SCD", &scd}}, cfg.window,
                              "switching-current distribution, kappa = " +
                                  svg::tick_label(cfg.kappa()),
                              analytic ? &*analytic : nullptr));
  }
  log << "switched " << scd.samples.size() << " of " << scd.n_runs << " runs\n";
  return out.written();
}

inline std::vector<fs::path> cmd_detect(const ExperimentConfig& cfg, std::ostream& log) {
  Artifacts out(cfg.output_dir);
  const auto opts = detail::run_options(cfg);
  DetectionOutcome d;
  json mode;
  if (cfg.contrast.any()) {
    // Two ensembles that differ in the [contrast] settings; the signal, if
    // any, is applied to both.
    EnsembleSpec a = cfg.ensemble;
    EnsembleSpec b = cfg.ensemble;
    a.master_seed = role_seed(cfg.ensemble.master_seed, SeedRole::signal_absent);
    b.master_seed = role_seed(cfg.ensemble.master_seed, SeedRole::signal_present);
    if (cfg.contrast.phi0) b.config.phi0 = *cfg.contrast.phi0;
    if (cfg.contrast.noise_intensity) b.config.noise_intensity = *cfg.contrast.noise_intensity;
    if (cfg.contrast.kappa) b.drive.v = *cfg.contrast.kappa * b.config.beta;
    b.validate();
    d = contrast(a, b, cfg.auc_threshold, opts);
    mode = "contrast";
  } else {
    d = detect(cfg.ensemble, cfg.auc_threshold, opts);
    mode = "signal";
  }
  out.text("detect_p0_samples.csv", io::scd_csv(d.scd0));
  out.text("detect_p1_samples.csv", io::scd_csv(d.scd1));
  out.text("detect_roc.csv", io::roc_csv(d.roc));
  json summary = detail::base_summary(cfg);
  summary["mode"] = mode;
  summary["auc"] = d.roc.auc;
  summary["auc_star"] = d.roc.auc_star();
  summary["d_kc"] = io::number(d.d_kc);
  summary["auc_threshold"] = cfg.auc_threshold;
  summary["detectable"] = d.detectable;
  summary["p0"] = io::scd_json(d.scd0, role_seed(cfg.ensemble.master_seed, SeedRole::signal_absent));
  summary["p1"] =
      io::scd_json(d.scd1, role_seed(cfg.ensemble.master_seed, SeedRole::signal_present));
  out.json_file("detect_summary.json", summary);
  if (cfg.plot) {
    out.text("detect_hist.svg", detail::scd_plot({{"P0", &d.scd0}, {"P1", &d.scd1}}, cfg.window,
                                                 "P0 and P1 switching-current distributions"));
    out.text("detect_roc.svg", detail::roc_plot(d.roc, "ROC of P1 against P0"));
  }
  log << "auc = " << d.roc.auc << ", auc* = " << d.roc.auc_star()
      << (d.detectable ? " (detectable)\n" : " (not detectable)\n");
  return out.written();
}

inline std::vector<fs::path> cmd_sweep(const ExperimentConfig& cfg, std::ostream& log) {
  Artifacts out(cfg.output_dir);
  std::string name;
  std::string x_label;
  SweepCurve curve;
  if (cfg.command == "sweep-kappa") {
    name = "kappa";
    x_label = "kappa = v / beta";
    curve = sweep_kappa(cfg.ensemble, cfg.sweep.values, detail::sweep_options(cfg, log, name));
  } else if (cfg.command == "sweep-phi0") {
    name = "phi0";
    x_label = "initial phase phi0";
    curve = sweep_phi0(cfg.ensemble, cfg.sweep.values, detail::sweep_options(cfg, log, name));
  } else {
    const bool pulse = std::holds_alternative<PhotonPulse>(cfg.ensemble.drive.signal);
    name = pulse ? "n_photons" : "amplitude";
    x_label = pulse ? "photon number" : "signal amplitude i_mw";
    curve = sweep_amplitude(cfg.ensemble, cfg.sweep.values,
                            detail::sweep_options(cfg, log, name));
  }
  curve.parameter = name;
  out.text("sweep_" + name + ".csv", io::sweep_csv(curve));
  json summary = detail::base_summary(cfg);
  summary["sweep"] = io::sweep_json(curve);
  if (cfg.sweep_dynamic_range) {
    try {
      const auto dr = dynamic_range(curve, cfg.dr_tolerance);
      summary["dynamic_range"] = {{"n_min", dr.n_min}, {"n_max", dr.n_max},
                                  {"tolerance", cfg.dr_tolerance}};
    } catch (const std::domain_error& e) {
      summary["dynamic_range"] = {{"error", e.what()}};
    }
  }
  out.json_file("sweep_summary.json", summary);
  if (cfg.plot) out.text("sweep.svg", detail::sweep_plot(curve, x_label, "auc* against " + name));
  return out.written();
}

inline std::vector<fs::path> cmd_bandwidth(const ExperimentConfig& cfg, std::ostream& log) {
  Artifacts out(cfg.output_dir);
  auto r = bandwidth_scan(cfg.ensemble, cfg.sweep.values, detail::sweep_options(cfg, log, "omega"));
  out.text("bandwidth.csv", io::sweep_csv(r.curve));
  json summary = detail::base_summary(cfg);
  summary["sweep"] = io::sweep_json(r.curve);
  summary["delta_omega"] = r.delta_omega;
  summary["band"] = {r.band_lo, r.band_hi};
  summary["n_in_band"] = r.n_in_band;
  summary["all_in_band_detectable"] = r.all_in_band_detectable;
  summary["in_band_variation"] = r.in_band_variation;
  out.json_file("bandwidth_summary.json", summary);
  if (cfg.plot) {
    out.text("bandwidth.svg",
             detail::sweep_plot(r.curve, "signal frequency omega / omega_J", "auc* across the band"));
  }
  return out.written();
}

inline std::vector<fs::path> cmd_metrics(const ExperimentConfig& cfg, std::ostream& log) {
  Artifacts out(cfg.output_dir);
  const auto& m = cfg.metrics;
  const double beta = cfg.ensemble.config.beta;
  json summary = detail::base_summary(cfg);
  if (cfg.ensemble.drive.v > 0.0) {
    const auto a = adiabaticity(cfg.ensemble.drive.v, beta);
    summary["adiabaticity"] = {{"epsilon", a.epsilon}, {"regime", to_string(a.regime)}};
  }
  summary["quality_factor"] = 1.0 / beta;
  summary["delta_omega"] = beta;
  summary["p_min_watts"] = min_power(m.i_mw, m.i_c, m.r_mw, m.chi);
  summary["p_min_over_ic2"] = min_power(m.i_mw, 1.0, m.r_mw, m.chi);
  summary["flux_coefficient_rad_per_tesla"] = flux_phase_coefficient(m.flux.l, m.flux.big_l);
  summary["phi0_from_flux"] = phi0_from_flux(m.flux);
  out.json_file("metrics.json", summary);
  log << "p_min = " << io::format_double(summary["p_min_watts"].get<double>()) << " W\n";
  return out.written();
}

/// Dispatches on cfg.command.
inline std::vector<fs::path> run_command(const ExperimentConfig& cfg, std::ostream& log) {
  if (cfg.command == "trajectory") return cmd_trajectory(cfg, log);
  if (cfg.command == "scd") return cmd_scd(cfg, log);
  if (cfg.command == "detect") return cmd_detect(cfg, log);
  if (cfg.command == "sweep-kappa" || cfg.command == "sweep-phi0" ||
      cfg.command == "sweep-amplitude") {
    return cmd_sweep(cfg, log);
  }
  if (cfg.command == "bandwidth") return cmd_bandwidth(cfg, log);
  if (cfg.command == "metrics") return cmd_metrics(cfg, log);
  throw ConfigError("run.command", "unknown command '" + cfg.command + "'");
}

}  // namespace jtd::app
