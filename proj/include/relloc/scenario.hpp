#pragma once

// Scenario files, the check dispatcher and report emission.
//
// A scenario file is either a list of scenario objects or an object
// {"seed": S, "tol": X, "scenarios": [...]}. Each scenario carries "type",
// optional "name", "seed", "tol", "repeat" and check-specific fields.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "relloc/serialize.hpp"

namespace relloc {

inline constexpr const char* kVersion = "1.0.0";

struct Scenario {
  std::size_t index = 0;
  /// JSON pointer of the scenario object in its file.
  std::string pointer;
  std::string type;
  std::string name;
  json params;
  std::uint64_t seed = 0;
  double tol = kDefaultTol;
  int repeat = 1;
};

struct ScenarioResult {
  Scenario scenario;
  CheckReport report;
  double wall_time = 0.0;
};

struct RunOptions {
  unsigned workers = 1;
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;
};

/// Names accepted in the "type" field.
const std::vector<std::string>& check_types();

/// Throws SchemaError (with a JSON pointer) on malformed documents.
std::vector<Scenario> parse_scenarios(const json& doc, const RunOptions& opts = {});

/// One repeat of one check. `seed` is the already-derived sub-seed. Throws
/// SchemaError on malformed check parameters; library errors become a FAIL
/// verdict with a note.
CheckReport run_check(const std::string& type, const json& params, std::uint64_t seed, double tol);

/// All repeats of a scenario, merged.
ScenarioResult run_one(const Scenario& s);

/// Runs scenarios on `workers` threads; results are in input order and do not
/// depend on the worker count.
std::vector<ScenarioResult> run_scenarios(const std::vector<Scenario>& scenarios, unsigned workers);

json report_document(const std::vector<ScenarioResult>& results);
/// Header plus one row per scenario: name, verdict, max_residual, tol, wall_time.
std::string csv_summary(const std::vector<ScenarioResult>& results);

/// Worker count from RELLOC_WORKERS, else 1.
unsigned default_workers();

/// Loads, runs and writes reports. Returns 0 when nothing failed, 1 on any
/// FAIL, 2 on input errors (reported on `err`).
int run_scenario_file(const std::string& path, const std::optional<std::string>& out_json,
                      const std::optional<std::string>& out_csv, const RunOptions& opts,
                      std::ostream& out, std::ostream& err);

/// Deterministic random instance of `kind` (state, effect, povm,
/// luders_instrument, commuting_pair, lattice_system). Throws
/// std::invalid_argument for unknown kinds.
json generate_instance(const std::string& kind, Eigen::Index dim, std::uint64_t seed);

/// Builds a lattice system from {"n", "mass", "a", "kind", "width",
/// "coherence", "spectrum"}; "spectrum" is "positive" or "sign_alternating".
LatticeLocalizationSystem system_from_json(const json& j, const std::string& path);

/// A Gaussian wave packet centred on the lab, projected onto the spectral
/// subspace where A(Delta0) >= threshold * ||A(Delta0)|| and renormalized,
/// so that 1 - tr(rho A(Delta0))/||A(Delta0)|| <= 1 - threshold. Throws
/// std::domain_error when that subspace is empty.
DensityState localized_state(const LatticeLocalizationSystem& sys, const CellSet& delta0,
                             double threshold);

}  // namespace relloc
