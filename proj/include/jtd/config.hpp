#pragma once

// Experiment configuration: INI text with sections, parsed by
// Boost.PropertyTree. Every key is checked against the schema below; an
// unknown section or key is an error that names it.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "jtd/drive.hpp"
#include "jtd/ensemble.hpp"
#include "jtd/langevin.hpp"
#include "jtd/protocol.hpp"

namespace jtd {

class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error(key.empty() ? message : key + ": " + message), key_(std::move(key)) {}

  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

inline const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"trajectory",      "scd",       "detect",
                                              "sweep-kappa",     "sweep-phi0", "sweep-amplitude",
                                              "bandwidth",       "metrics"};
  return names;
}

struct GridSpec {
  std::vector<double> values;  // explicit grid; empty means from/to/points
  double from = 0.0;
  double to = 0.0;
  std::size_t points = 0;

  std::vector<double> resolve() const {
    return values.empty() ? linspace(from, to, points) : values;
  }
};

struct TrajectoryOptions {
  std::vector<double> kappa_values;  // empty: the [drive] value
  std::vector<double> phi0_values;   // empty: the [junction] value
  std::uint64_t record_every = 100;  // 0 disables path output
};

struct AnalyticOptions {
  bool enabled = false;
  double a_th = 1.0;
  std::size_t grid_points = 20001;
};

struct ContrastOptions {
  std::optional<double> phi0;
  std::optional<double> noise_intensity;
  std::optional<double> kappa;

  bool any() const { return phi0 || noise_intensity || kappa; }
};

struct MetricsInputs {
  double i_mw = 2.91e-4;
  double i_c = 1.0;  // A; 1 makes p_min_watts the coefficient of I_c^2
  double r_mw = 100.0;
  double chi = 0.5;
  FluxModulation flux;
};

struct PlotWindow {
  double lo = 0.8;
  double hi = 1.02;
  std::size_t bins = 200;
};

struct ExperimentConfig {
  std::string command;
  EnsembleSpec ensemble;
  std::string output_dir = "out";
  bool plot = false;
  unsigned threads = 0;
  double auc_threshold = kAucThreshold;
  ContrastOptions contrast;
  GridSpec sweep;
  bool sweep_dynamic_range = false;
  double dr_tolerance = 0.02;
  TrajectoryOptions trajectory;
  AnalyticOptions analytic;
  MetricsInputs metrics;
  PlotWindow window;

  double kappa() const { return ensemble.drive.kappa(ensemble.config.beta); }
};

namespace detail {

inline const std::map<std::string, std::set<std::string>>& config_schema() {
  static const std::map<std::string, std::set<std::string>> schema{
      {"run", {"command", "seed", "runs", "out", "plot", "threads"}},
      {"junction",
       {"beta", "noise_intensity", "phi0", "phi_dot0", "dt", "phi_esc", "i_b_max", "escape",
        "max_steps"}},
      {"drive", {"kappa", "v"}},
      {"signal", {"type", "amplitude", "omega", "n_photons", "width", "arrival"}},
      {"detect", {"auc_threshold"}},
      {"contrast", {"phi0", "noise_intensity", "kappa"}},
      {"sweep", {"values", "from", "to", "points", "dynamic_range", "tolerance"}},
      {"trajectory", {"kappa_values", "phi0_values", "record_every"}},
      {"analytic", {"enabled", "a_th", "grid_points"}},
      {"metrics", {"i_mw", "i_c", "r_mw", "chi", "b0", "d", "lambda", "l", "big_l", "phi0_base"}},
      {"plot", {"lo", "hi", "bins"}},
  };
  return schema;
}

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

inline double parse_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  double x = 0.0;
  const char* first = t.data();
  const char* last = t.data() + t.size();
  if (!t.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, x);
  if (ec != std::errc() || ptr != last || t.empty()) {
    throw ConfigError(key, "expected a number, got '" + t + "'");
  }
  if (!std::isfinite(x)) throw ConfigError(key, "value must be finite");
  return x;
}

inline std::uint64_t parse_u64(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  std::uint64_t x = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), x);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw ConfigError(key, "expected a non-negative integer, got '" + t + "'");
  }
  return x;
}

inline bool parse_bool(const std::string& key, const std::string& text) {
  std::string t = trim(text);
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  if (t == "true" || t == "yes" || t == "on" || t == "1") return true;
  if (t == "false" || t == "no" || t == "off" || t == "0") return false;
  throw ConfigError(key, "expected true or false, got '" + t + "'");
}

inline std::vector<double> parse_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(key, item));
  if (out.empty()) throw ConfigError(key, "expected a comma-separated list of numbers");
  return out;
}

inline void require(bool ok, const std::string& key, const std::string& message) {
  if (!ok) throw ConfigError(key, message);
}

// Typed access to one section.
class Section {
 public:
  Section(const boost::property_tree::ptree* tree, std::string name)
      : tree_(tree), name_(std::move(name)) {}

  std::optional<std::string> raw(const std::string& key) const {
    if (!tree_) return std::nullopt;
    const auto it = tree_->find(key);
    if (it == tree_->not_found()) return std::nullopt;
    return it->second.data();
  }

  std::string full(const std::string& key) const { return name_ + "." + key; }

  void get(const std::string& key, double& out) const {
    if (auto s = raw(key)) out = parse_double(full(key), *s);
  }
  void get(const std::string& key, std::optional<double>& out) const {
    if (auto s = raw(key)) out = parse_double(full(key), *s);
  }
  template <std::unsigned_integral T>
  void get(const std::string& key, T& out) const {
    if (auto s = raw(key)) {
      const auto x = parse_u64(full(key), *s);
      require(x <= std::numeric_limits<T>::max(), full(key), "too large");
      out = static_cast<T>(x);
    }
  }
  void get(const std::string& key, bool& out) const {
    if (auto s = raw(key)) out = parse_bool(full(key), *s);
  }
  void get(const std::string& key, std::string& out) const {
    if (auto s = raw(key)) out = trim(*s);
  }
  void get(const std::string& key, std::vector<double>& out) const {
    if (auto s = raw(key)) out = parse_list(full(key), *s);
  }

 private:
  const boost::property_tree::ptree* tree_;
  std::string name_;
};

inline void check_schema(const boost::property_tree::ptree& root) {
  const auto& schema = config_schema();
  for (const auto& [name, node] : root) {
    const auto sec = schema.find(name);
    if (sec == schema.end()) {
      if (node.empty()) throw ConfigError(name, "keys must sit inside a [section]");
      throw ConfigError(name, "unknown section");
    }
    for (const auto& [key, value] : node) {
      if (!sec->second.count(key)) throw ConfigError(name + "." + key, "unknown key");
      if (!value.empty()) throw ConfigError(name + "." + key, "nested keys are not supported");
    }
  }
}

}  // namespace detail

/// Parses INI text into a resolved, validated configuration. A non-empty
/// `command` stands in for, and must agree with, run.command.
inline ExperimentConfig parse_config(std::istream& in, const std::string& source = "config",
                                     const std::string& command = "") {
  namespace pt = boost::property_tree;
  pt::ptree root;
  try {
    pt::read_ini(in, root);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("", source + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  detail::check_schema(root);
  auto section = [&](const char* name) {
    const auto it = root.find(name);
    return detail::Section(it == root.not_found() ? nullptr : &it->second, name);
  };
  using detail::require;

  ExperimentConfig c;
  const auto run = section("run");
  run.get("command", c.command);
  if (!command.empty()) {
    require(c.command.empty() || c.command == command, "run.command",
            "config says '" + c.command + "' but '" + command + "' was requested");
    c.command = command;
  }
  run.get("seed", c.ensemble.master_seed);
  run.get("runs", c.ensemble.n_runs);
  run.get("out", c.output_dir);
  run.get("plot", c.plot);
  run.get("threads", c.threads);
  require(c.threads <= 4096, "run.threads", "must be <= 4096");
  require(!c.command.empty(), "run.command", "missing; set it in [run] or on the command line");
  {
    const auto& names = command_names();
    require(std::find(names.begin(), names.end(), c.command) != names.end(), "run.command",
            "unknown command '" + c.command + "'");
  }
  require(c.ensemble.n_runs >= 1, "run.runs", "must be >= 1");

  auto& jc = c.ensemble.config;
  const auto junction = section("junction");
  junction.get("beta", jc.beta);
  junction.get("noise_intensity", jc.noise_intensity);
  junction.get("phi0", jc.phi0);
  junction.get("phi_dot0", jc.phi_dot0);
  junction.get("dt", jc.dt);
  junction.get("phi_esc", jc.phi_esc);
  junction.get("i_b_max", jc.i_b_max);
  junction.get("max_steps", jc.max_steps);
  std::string escape = "fixed_threshold";
  junction.get("escape", escape);
  if (escape == "fixed_threshold") {
    jc.escape = EscapeCriterion::fixed_threshold;
  } else if (escape == "barrier_top") {
    jc.escape = EscapeCriterion::barrier_top;
  } else {
    throw ConfigError("junction.escape", "expected fixed_threshold or barrier_top");
  }
  require(jc.beta > 0.0, "junction.beta", "must be > 0");
  require(jc.dt > 0.0, "junction.dt", "must be > 0");
  require(jc.noise_intensity >= 0.0, "junction.noise_intensity", "must be >= 0");
  require(jc.escape != EscapeCriterion::fixed_threshold || jc.phi_esc > jc.phi0,
          "junction.phi_esc", "must exceed junction.phi0");
  require(jc.i_b_max > 0.0 && jc.i_b_max <= 1.2, "junction.i_b_max", "must lie in (0, 1.2]");

  const auto drive = section("drive");
  std::optional<double> kappa;
  std::optional<double> v;
  drive.get("kappa", kappa);
  drive.get("v", v);
  require(!(kappa && v), "drive.v", "set either drive.kappa or drive.v, not both");
  if (v) {
    require(*v >= 0.0, "drive.v", "must be >= 0");
    c.ensemble.drive.v = *v;
  } else {
    const double k = kappa.value_or(0.2);
    require(k >= 0.0, "drive.kappa", "must be >= 0");
    c.ensemble.drive.v = k * jc.beta;
  }
  require(c.ensemble.drive.v > 0.0 || jc.max_steps > 0, "junction.max_steps",
          "must be set when the sweep rate is zero");

  const auto signal = section("signal");
  std::string type = "none";
  signal.get("type", type);
  if (type == "none") {
    for (const char* k : {"amplitude", "omega", "n_photons", "width", "arrival"}) {
      require(!signal.raw(k), signal.full(k), "not used by signal.type = none");
    }
    c.ensemble.drive.signal = NoSignal{};
  } else if (type == "cw") {
    ContinuousWave cw;
    signal.get("amplitude", cw.amplitude);
    signal.get("omega", cw.omega);
    for (const char* k : {"n_photons", "width", "arrival"}) {
      require(!signal.raw(k), signal.full(k), "not used by signal.type = cw");
    }
    require(cw.amplitude >= 0.0, "signal.amplitude", "must be >= 0");
    c.ensemble.drive.signal = cw;
  } else if (type == "pulse") {
    PhotonPulse p;
    signal.get("amplitude", p.amplitude);
    signal.get("omega", p.omega);
    signal.get("n_photons", p.n_photons);
    signal.get("width", p.width);
    signal.get("arrival", p.arrival);
    require(p.n_photons >= 0.0, "signal.n_photons", "must be >= 0");
    require(p.width > 0.0, "signal.width", "must be > 0");
    require(p.arrival || c.ensemble.drive.v > 0.0, "signal.arrival",
            "must be set when the sweep rate is zero");
    // An unset arrival follows the ramp, 1 / (2v), including across kappa sweeps.
    c.ensemble.drive.signal = p;
  } else {
    throw ConfigError("signal.type", "expected none, cw or pulse");
  }

  section("detect").get("auc_threshold", c.auc_threshold);
  require(c.auc_threshold >= 0.5 && c.auc_threshold <= 1.0, "detect.auc_threshold",
          "must lie in [0.5, 1]");

  const auto contrast = section("contrast");
  contrast.get("phi0", c.contrast.phi0);
  contrast.get("noise_intensity", c.contrast.noise_intensity);
  contrast.get("kappa", c.contrast.kappa);
  require(!c.contrast.noise_intensity || *c.contrast.noise_intensity >= 0.0,
          "contrast.noise_intensity", "must be >= 0");
  require(!c.contrast.kappa || *c.contrast.kappa > 0.0, "contrast.kappa", "must be > 0");

  const auto sweep = section("sweep");
  sweep.get("values", c.sweep.values);
  sweep.get("from", c.sweep.from);
  sweep.get("to", c.sweep.to);
  sweep.get("points", c.sweep.points);
  sweep.get("dynamic_range", c.sweep_dynamic_range);
  sweep.get("tolerance", c.dr_tolerance);
  require(c.sweep.values.empty() || !(sweep.raw("from") || sweep.raw("to") || sweep.raw("points")),
          "sweep.values", "set either sweep.values or sweep.from/to/points");
  require(c.dr_tolerance >= 0.0, "sweep.tolerance", "must be >= 0");
  const bool is_sweep = c.command == "sweep-kappa" || c.command == "sweep-phi0" ||
                        c.command == "sweep-amplitude" || c.command == "bandwidth";
  if (c.sweep.values.empty()) {
    if (sweep.raw("points")) {
      require(c.sweep.points >= 1, "sweep.points", "must be >= 1");
    } else if (c.command == "sweep-kappa") {
      c.sweep.values = default_kappa_grid();
    } else if (c.command == "sweep-phi0") {
      c.sweep.values = default_phi0_grid();
    } else if (c.command == "bandwidth") {
      c.sweep.values = linspace(1.0 - 0.5 * jc.beta, 1.0 + 0.5 * jc.beta, 5);
    } else if (is_sweep) {
      throw ConfigError("sweep.values", "required for " + c.command);
    }
  }
  if (c.sweep.values.empty() && c.sweep.points >= 1) c.sweep.values = c.sweep.resolve();

  const auto traj = section("trajectory");
  traj.get("kappa_values", c.trajectory.kappa_values);
  traj.get("phi0_values", c.trajectory.phi0_values);
  traj.get("record_every", c.trajectory.record_every);
  for (double k : c.trajectory.kappa_values) {
    require(k > 0.0, "trajectory.kappa_values", "entries must be > 0");
  }
  for (double p : c.trajectory.phi0_values) {
    require(jc.escape != EscapeCriterion::fixed_threshold || jc.phi_esc > p,
            "trajectory.phi0_values", "entries must be below junction.phi_esc");
  }

  const auto analytic = section("analytic");
  analytic.get("enabled", c.analytic.enabled);
  analytic.get("a_th", c.analytic.a_th);
  analytic.get("grid_points", c.analytic.grid_points);
  require(c.analytic.a_th > 0.0 && c.analytic.a_th <= 1.0, "analytic.a_th", "must lie in (0, 1]");
  require(c.analytic.grid_points >= 2, "analytic.grid_points", "must be >= 2");

  const auto metrics = section("metrics");
  auto& m = c.metrics;
  metrics.get("i_mw", m.i_mw);
  metrics.get("i_c", m.i_c);
  metrics.get("r_mw", m.r_mw);
  metrics.get("chi", m.chi);
  metrics.get("b0", m.flux.b0);
  metrics.get("big_l", m.flux.big_l);
  metrics.get("phi0_base", m.flux.phi0_base);
  std::optional<double> d;
  std::optional<double> lambda;
  metrics.get("d", d);
  metrics.get("lambda", lambda);
  if (metrics.raw("l")) {
    require(!d && !lambda, "metrics.l", "set either metrics.l or metrics.d and metrics.lambda");
    metrics.get("l", m.flux.l);
  } else if (d || lambda) {
    require(d && lambda, d ? "metrics.lambda" : "metrics.d", "metrics.d and metrics.lambda go together");
    m.flux.l = FluxModulation::effective_length(*d, *lambda);
  }
  require(m.i_mw >= 0.0, "metrics.i_mw", "must be >= 0");
  require(m.i_c > 0.0, "metrics.i_c", "must be > 0");
  require(m.r_mw > 0.0, "metrics.r_mw", "must be > 0");
  require(m.chi > 0.0, "metrics.chi", "must be > 0");
  require(m.flux.l > 0.0, "metrics.l", "must be > 0");
  require(m.flux.big_l > 0.0, "metrics.big_l", "must be > 0");

  const auto plot = section("plot");
  plot.get("lo", c.window.lo);
  plot.get("hi", c.window.hi);
  plot.get("bins", c.window.bins);
  require(c.window.hi > c.window.lo, "plot.hi", "must exceed plot.lo");
  require(c.window.bins >= 1, "plot.bins", "must be >= 1");

  try {
    c.ensemble.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("", e.what());
  }
  return c;
}

inline ExperimentConfig parse_config_text(const std::string& text,
                                          const std::string& command = "") {
  std::istringstream in(text);
  return parse_config(in, "config", command);
}

inline ExperimentConfig load_config(const std::string& path, const std::string& command = "") {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file '" + path + "'");
  return parse_config(in, path, command);
}

}  // namespace jtd
