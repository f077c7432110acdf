#pragma once

// CSV and JSON artifacts. Doubles in CSV use 17 significant digits, which
// round-trips every binary64 value exactly; JSON uses the shortest
// round-trip form.

#include <charconv>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "jtd/config.hpp"
#include "jtd/discriminator.hpp"
#include "jtd/ensemble.hpp"
#include "jtd/protocol.hpp"

namespace jtd::io {

using json = nlohmann::ordered_json;

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, r.ptr);
}

inline double parse_double(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double x = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), x);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size()) {
    throw std::runtime_error("io: bad number '" + s + "'");
  }
  return x;
}

// JSON has no NaN or infinity; they become null.
inline json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("io: cannot write " + path.string());
  out << text;
  if (!out) throw IoError("io: write failed for " + path.string());
}

inline void write_json(const std::filesystem::path& path, const json& j) {
  write_file(path, j.dump(2) + "\n");
}

// ---- CSV ----

inline std::string scd_csv(const Scd& scd) {
  std::string s = "index,i_sw\n";
  for (std::size_t k = 0; k < scd.samples.size(); ++k) {
    s += std::to_string(scd.indices[k]);
    s += ',';
    s += format_double(scd.samples[k]);
    s += '\n';
  }
  return s;
}

struct CsvSamples {
  std::vector<std::uint64_t> indices;
  std::vector<double> samples;
};

inline CsvSamples parse_scd_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "index,i_sw") {
    throw std::runtime_error("io: missing 'index,i_sw' header");
  }
  CsvSamples out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw std::runtime_error("io: bad row '" + line + "'");
    out.indices.push_back(std::stoull(line.substr(0, comma)));
    out.samples.push_back(parse_double(line.substr(comma + 1)));
  }
  return out;
}

inline std::string roc_csv(const RocResult& roc) {
  std::string s = "fpr,tpr\n";
  for (const auto& p : roc.points) s += format_double(p.fpr) + "," + format_double(p.tpr) + "\n";
  return s;
}

inline std::string sweep_csv(const SweepCurve& c) {
  std::string s = c.parameter + ",auc_raw,auc_star,d_kc,n0,n1\n";
  for (const auto& p : c.points) {
    s += format_double(p.value) + "," + format_double(p.auc_raw) + "," +
         format_double(p.auc_star) + "," + format_double(p.d_kc) + "," + std::to_string(p.n0) +
         "," + std::to_string(p.n1) + "\n";
  }
  return s;
}

// ---- JSON ----

inline const char* escape_name(EscapeCriterion e) {
  return e == EscapeCriterion::barrier_top ? "barrier_top" : "fixed_threshold";
}

/// The drive's signal. An unset pulse arrival is reported at its resolved
/// value, flagged with "arrival_default".
inline json signal_json(const DriveSpec& d) {
  return std::visit(
      [&d](const auto& alt) -> json {
        using T = std::decay_t<decltype(alt)>;
        if constexpr (std::is_same_v<T, NoSignal>) {
          return {{"type", "none"}};
        } else if constexpr (std::is_same_v<T, ContinuousWave>) {
          return {{"type", "cw"}, {"amplitude", alt.amplitude}, {"omega", alt.omega}};
        } else {
          return {{"type", "pulse"},
                  {"amplitude", alt.amplitude},
                  {"omega", alt.omega},
                  {"n_photons", alt.n_photons},
                  {"width", alt.width},
                  {"arrival", alt.arrival      ? json(*alt.arrival)
                              : d.v > 0.0      ? json(1.0 / (2.0 * d.v))
                                               : json(nullptr)},
                  {"arrival_default", !alt.arrival}};
        }
      },
      d.signal);
}

inline json junction_json(const JunctionConfig& c) {
  return {{"beta", c.beta},         {"noise_intensity", c.noise_intensity},
          {"phi0", c.phi0},         {"phi_dot0", c.phi_dot0},
          {"dt", c.dt},             {"phi_esc", c.phi_esc},
          {"i_b_max", c.i_b_max},   {"escape", escape_name(c.escape)},
          {"max_steps", c.max_steps}, {"theta", c.theta()}};
}

inline json ensemble_json(const EnsembleSpec& s) {
  return {{"runs", s.n_runs},
          {"seed", s.master_seed},
          {"junction", junction_json(s.config)},
          {"drive", {{"v", s.drive.v}, {"kappa", s.drive.kappa(s.config.beta)}}},
          {"signal", signal_json(s.drive)}};
}

inline json vector_json(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(number(x));
  return a;
}

/// Every resolved setting, defaults included.
inline json manifest_json(const ExperimentConfig& c) {
  json contrast = json::object();
  if (c.contrast.phi0) contrast["phi0"] = *c.contrast.phi0;
  if (c.contrast.noise_intensity) contrast["noise_intensity"] = *c.contrast.noise_intensity;
  if (c.contrast.kappa) contrast["kappa"] = *c.contrast.kappa;
  return {
      {"command", c.command},
      {"ensemble", ensemble_json(c.ensemble)},
      {"out", c.output_dir},
      {"plot", c.plot},
      {"threads", c.threads},
      {"detect", {{"auc_threshold", c.auc_threshold}}},
      {"contrast", contrast},
      {"sweep",
       {{"values", vector_json(c.sweep.values)},
        {"dynamic_range", c.sweep_dynamic_range},
        {"tolerance", c.dr_tolerance}}},
      {"trajectory",
       {{"kappa_values", vector_json(c.trajectory.kappa_values)},
        {"phi0_values", vector_json(c.trajectory.phi0_values)},
        {"record_every", c.trajectory.record_every}}},
      {"analytic",
       {{"enabled", c.analytic.enabled},
        {"a_th", c.analytic.a_th},
        {"grid_points", c.analytic.grid_points}}},
      {"metrics",
       {{"i_mw", c.metrics.i_mw},
        {"i_c", c.metrics.i_c},
        {"r_mw", c.metrics.r_mw},
        {"chi", c.metrics.chi},
        {"b0", c.metrics.flux.b0},
        {"l", c.metrics.flux.l},
        {"big_l", c.metrics.flux.big_l},
        {"phi0_base", c.metrics.flux.phi0_base}}},
      {"plot_window", {{"lo", c.window.lo}, {"hi", c.window.hi}, {"bins", c.window.bins}}},
  };
}

inline json histogram_json(const Histogram& h) {
  return {{"edges", vector_json(h.edges)},
          {"counts", h.counts},
          {"underflow", h.underflow},
          {"overflow", h.overflow}};
}

inline json sample_stats_json(std::span<const double> x) {
  if (x.empty()) return {{"n", 0}};
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  const double sd = x.size() > 1 ? std::sqrt(ss / static_cast<double>(x.size() - 1)) : 0.0;
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  return {{"n", x.size()}, {"mean", mean}, {"std", sd}, {"min", *lo}, {"max", *hi}};
}

inline json scd_json(const Scd& scd, std::uint64_t seed) {
  return {{"n_runs", scd.n_runs},
          {"n_unswitched", scd.n_unswitched},
          {"seed", seed},
          {"stats", sample_stats_json(scd.samples)},
          {"modes", count_modes(scd.hist.counts)},
          {"histogram", histogram_json(scd.hist)}};
}

inline json roc_json(const RocResult& roc, double d_kc) {
  return {{"auc", roc.auc},
          {"auc_star", roc.auc_star()},
          {"n0", roc.n0},
          {"n1", roc.n1},
          {"d_kc", number(d_kc)}};
}

inline json sweep_json(const SweepCurve& c) {
  json pts = json::array();
  for (const auto& p : c.points) {
    pts.push_back({{"value", p.value},
                   {"auc_raw", p.auc_raw},
                   {"auc_star", p.auc_star},
                   {"d_kc", number(p.d_kc)},
                   {"n0", p.n0},
                   {"n1", p.n1}});
  }
  const auto first = c.first_detectable();
  return {{"parameter", c.parameter},
          {"auc_threshold", c.auc_threshold},
          {"argmax", c.points.empty() ? json(nullptr) : json(c.best_value())},
          {"best_auc_star", c.points.empty() ? json(nullptr) : json(c.points[c.argmax()].auc_star)},
          {"first_detectable", first ? json(*first) : json(nullptr)},
          {"points", pts}};
}

}  // namespace jtd::io
