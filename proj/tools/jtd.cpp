// jtd: run switching-current experiments from a config file.
//
//   jtd [command] --config <file> [--seed N] [--runs N] [--out DIR] [--plot] [--threads N]
//
// Exit status: 0 success, 1 configuration or usage error, 2 numeric failure.

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "jtd/app.hpp"

namespace {

// One JSON object per error, on a single line of stderr.
int fail(int code, nlohmann::ordered_json err) {
  std::cerr << err.dump() << std::endl;
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App cli{"Josephson threshold detector simulator"};
  std::string command;
  std::string config_path;
  std::uint64_t seed = 0;
  std::size_t runs = 0;
  std::string out_dir;
  bool plot = false;
  unsigned threads = 0;
  bool quiet = false;

  std::string choices;
  for (const auto& c : jtd::command_names()) choices += (choices.empty() ? "" : ", ") + c;
  cli.add_option("command", command, "one of: " + choices + " (default: run.command)");
  cli.add_option("--config,-c", config_path, "experiment config (INI)")->required();
  auto* seed_opt = cli.add_option("--seed", seed, "master seed");
  auto* runs_opt = cli.add_option("--runs", runs, "trajectories per ensemble")->check(CLI::PositiveNumber);
  auto* out_opt = cli.add_option("--out", out_dir, "output directory");
  cli.add_flag("--plot", plot, "write SVG plots");
  auto* threads_opt =
      cli.add_option("--threads", threads, "worker threads (default: JTD_THREADS or all cores)");
  cli.add_flag("--quiet,-q", quiet, "no progress output");

  try {
    cli.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return cli.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(1, {{"error", "usage"}, {"message", e.what()}});
  }

  jtd::ExperimentConfig cfg;
  try {
    cfg = jtd::load_config(config_path, command);
    if (*seed_opt) cfg.ensemble.master_seed = seed;
    if (*runs_opt) cfg.ensemble.n_runs = runs;
    if (*out_opt) cfg.output_dir = out_dir;
    if (plot) cfg.plot = true;
    if (*threads_opt) cfg.threads = threads;
  } catch (const jtd::ConfigError& e) {
    return fail(1, {{"error", "config"}, {"key", e.key()}, {"message", e.what()}});
  }

  std::ostream null_log(nullptr);
  std::ostream& log = quiet ? null_log : std::cerr;
  try {
    for (const auto& path : jtd::app::run_command(cfg, log)) std::cout << path.string() << "\n";
  } catch (const jtd::NumericError& e) {
    return fail(2, {{"error", "numeric"},
                    {"module", "langevin"},
                    {"trajectory", e.trajectory()},
                    {"step", e.step()},
                    {"message", e.what()}});
  } catch (const jtd::ConfigError& e) {
    return fail(1, {{"error", "config"}, {"key", e.key()}, {"message", e.what()}});
  } catch (const jtd::io::IoError& e) {
    return fail(1, {{"error", "io"}, {"message", e.what()}});
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(1, {{"error", "io"}, {"message", e.what()}});
  } catch (const std::invalid_argument& e) {
    return fail(1, {{"error", "config"}, {"key", ""}, {"message", e.what()}});
  } catch (const std::exception& e) {
    return fail(2, {{"error", "numeric"}, {"module", "protocol"}, {"message", e.what()}});
  }
  return 0;
}
