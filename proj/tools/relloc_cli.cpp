// relloc: run scenario files and generate random instances.
//
// Exit codes: 0 all checks passed or informational, 1 some check failed,
// 2 malformed input or usage error.

#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "relloc/scenario.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Measurement-causality and localization checks"};
  app.require_subcommand(1);

  std::string file;
  std::string out_json;
  std::string out_csv;
  unsigned workers = relloc::default_workers();
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;
  auto* run = app.add_subcommand("run", "Run every scenario in a JSON file");
  run->add_option("file", file, "Scenario file")->required();
  run->add_option("--out", out_json, "Write the full JSON report here");
  run->add_option("--csv", out_csv, "Write a CSV summary here");
  run->add_option("--workers", workers, "Worker threads (default: RELLOC_WORKERS or 1)")
      ->check(CLI::PositiveNumber);
  run->add_option("--tol", tol, "Override every scenario tolerance")->check(CLI::PositiveNumber);
  run->add_option("--seed", seed, "Override the master seed");

  std::string kind;
  long dim = 2;
  std::uint64_t gen_seed = 0;
  auto* gen = app.add_subcommand("gen", "Print a random instance as JSON");
  gen->add_option("kind", kind,
                  "state, effect, povm, luders_instrument, commuting_pair or lattice_system")
      ->required();
  gen->add_option("--dim", dim, "Hilbert-space dimension (lattice size for lattice_system)")
      ->check(CLI::Range(1, 64));
  gen->add_option("--seed", gen_seed, "Seed");

  app.add_subcommand("version", "Print the version");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (*run) {
    relloc::RunOptions opts;
    opts.workers = workers;
    opts.tol = tol;
    opts.seed = seed;
    auto opt_path = [](const std::string& s) {
      return s.empty() ? std::nullopt : std::optional<std::string>(s);
    };
    return relloc::run_scenario_file(file, opt_path(out_json), opt_path(out_csv), opts, std::cout,
                                     std::cerr);
  }
  if (*gen) {
    try {
      std::cout << relloc::generate_instance(kind, dim, gen_seed).dump(2) << '\n';
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return 2;
    }
    return 0;
  }
  std::cout << "relloc " << relloc::kVersion << '\n';
  return 0;
}
