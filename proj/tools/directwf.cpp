// Batch front-end: run, sweep, discrete, oracle.
#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <sstream>

#include "directwf/commands.hpp"
#include "directwf/config.hpp"
#include "directwf/error.hpp"

namespace {

struct NullBuffer : std::streambuf {
  int overflow(int c) override { return c; }
};

directwf::RunConfig resolve_config(const std::string& path, std::optional<std::uint64_t> seed) {
  directwf::RunConfig config =
      path.empty() ? directwf::parse_run_config({}) : directwf::load_run_config(path);
  if (seed) config.counting.seed = *seed;
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Direct wavefunction measurement by weak measurement and post-selection"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  bool quiet = false;
  app.add_option("--config", config_path, "Key-value configuration file")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--seed", seed, "Counting RNG seed (overrides counting.seed)");
  app.add_flag("--quiet", quiet, "Suppress progress output");

  auto* run = app.add_subcommand("run", "Scan, reconstruct and report");

  auto* sweep = app.add_subcommand("sweep", "Repeat the run over a list of parameter values");
  std::string parameter;
  std::vector<double> values;
  sweep->add_option("--param", parameter,
                    "measurement.phi_deg | optics.slit_offset_um | optics.lens_shift_um | "
                    "optics.slit_width_um | counting.n_incident")
      ->required();
  sweep->add_option("--values", values, "Comma-separated values")->required()->delimiter(',');

  auto* discrete = app.add_subcommand("discrete", "N-level protocol with Fourier-MUB post-selection");
  std::size_t dim = 0;
  std::string state_file;
  std::optional<std::size_t> b0;
  discrete->add_option("--dim", dim, "Hilbert-space dimension N (2..64)")->required();
  discrete->add_option("--state", state_file, "CSV with columns index,re,im")
      ->required()
      ->check(CLI::ExistingFile);
  discrete->add_option("--b0", b0, "Post-selection index (default: all)");

  auto* oracle = app.add_subcommand("oracle", "Compare the engine with the dense brute-force oracle");
  bool inject_fault = false;
  oracle->add_flag("--inject-fault", inject_fault, "Negative control: corrupt the oracle convention")
      ->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : directwf::kExitValidation;
  }

  NullBuffer null_buffer;
  std::ostream null_stream(&null_buffer);
  std::ostream& log = quiet ? null_stream : std::cout;

  try {
    if (*run) return directwf::cmd_run(resolve_config(config_path, seed), out_dir, log);
    if (*sweep) {
      return directwf::cmd_sweep(resolve_config(config_path, seed), parameter, values, out_dir, log);
    }
    if (*discrete) return directwf::cmd_discrete(dim, state_file, b0, out_dir, log);
    if (*oracle) {
      return directwf::cmd_oracle(resolve_config(config_path, seed), out_dir, inject_fault, log);
    }
  } catch (const directwf::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return directwf::exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return directwf::kExitFailure;
  }
  return directwf::kExitFailure;
}
