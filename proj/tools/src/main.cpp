// vvlab <command> --config <path> [--seed N] [--out <dir>] [--threads N]
//
// Exit codes: 0 success, 2 config error, 3 numerical failure, 4 invariant
// violation.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vvlab/commands.hpp"
#include "vvlab/config.hpp"
#include "vvlab/errors.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kNumericalError = 3;
constexpr int kInvariantViolation = 4;

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  unsigned threads = 0;
  std::optional<std::uint64_t> paths;
  std::optional<double> barrier;
  std::optional<double> tolerance;
  std::vector<double> xs;
};

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw vvlab::ConfigError("cannot write '" + path.string() + "'");
  out << bytes;
  if (!out) throw vvlab::ConfigError("failed writing '" + path.string() + "'");
}

int run(const std::string& command, const Options& opts) {
  vvlab::ExperimentConfig config = vvlab::load_config(opts.config_path);
  if (opts.seed) config.seed = *opts.seed;
  if (opts.paths) config.simulation.n_paths = *opts.paths;
  if (opts.barrier) config.simulation.barrier = *opts.barrier;
  if (opts.tolerance) config.upper_bound.tolerance = *opts.tolerance;
  if (!opts.xs.empty()) config.x_grid = opts.xs;
  config.simulation.threads = opts.threads;
  config.simulation.validate();

  const vvlab::CommandOutput out = vvlab::run_command(command, config);

  const std::string dir = opts.out_dir.empty() ? config.output_dir : opts.out_dir;
  if (dir.empty()) {
    std::cout << out.csv << std::flush;
  } else {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw vvlab::ConfigError("cannot create output directory '" + dir + "': " + ec.message());
    write_file(std::filesystem::path(dir) / (command + ".csv"), out.csv);
    write_file(std::filesystem::path(dir) / (command + ".json"), out.json);
  }
  if (out.violation) throw vvlab::InvariantViolation(*out.violation);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tail bounds and estimates for the maximum of a negative-drift random walk"};
  app.require_subcommand(1);

  Options opts;
  std::string chosen;
  for (std::string_view name : vvlab::command_names()) {
    CLI::App* sub = app.add_subcommand(std::string(name));
    sub->add_option("--config", opts.config_path, "JSON experiment config")->required();
    sub->add_option("--seed", opts.seed, "master seed (overrides the config)");
    sub->add_option("--out", opts.out_dir, "write <command>.csv and <command>.json here");
    sub->add_option("--threads", opts.threads, "worker threads, 0 = all cores; never changes results");
    sub->add_option("--paths", opts.paths, "simulation.n_paths");
    sub->add_option("--barrier", opts.barrier, "simulation.barrier");
    sub->add_option("--tolerance", opts.tolerance, "upper_bound.tolerance");
    sub->add_option("--x", opts.xs, "x grid (overrides the config)")->delimiter(',');
    sub->callback([&chosen, name] { chosen = std::string(name); });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    return run(chosen, opts);
  } catch (const vvlab::ConfigError& e) {
    std::cerr << "vvlab: config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const vvlab::NumericalError& e) {
    std::cerr << "vvlab: numerical failure: " << e.what() << '\n';
    return kNumericalError;
  } catch (const vvlab::InvariantViolation& e) {
    std::cerr << "vvlab: invariant violation: " << e.what() << '\n';
    return kInvariantViolation;
  } catch (const std::exception& e) {
    std::cerr << "vvlab: numerical failure: " << e.what() << '\n';
    return kNumericalError;
  }
}
