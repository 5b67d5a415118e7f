#include "relloc/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>
#include <thread>

#include "relloc/causality.hpp"
#include "relloc/random.hpp"

namespace relloc {

namespace {

// ---------------------------------------------------------------------------
// Parameter helpers. Paths are relative to the scenario object.

std::string at(const std::string& key) { return "/" + key; }

std::size_t get_count(const json& p, const std::string& key, std::size_t fallback) {
  const std::int64_t v = get_int(p, key, "", static_cast<std::int64_t>(fallback));
  if (v < 0) throw SchemaError(at(key), "expected a non-negative integer");
  return static_cast<std::size_t>(v);
}

Eigen::Index get_dim(const json& p, const std::string& key, Eigen::Index fallback) {
  const std::int64_t v = get_int(p, key, "", fallback);
  if (v < 1 || v > 64) throw SchemaError(at(key), "dimension must be in [1, 64]");
  return static_cast<Eigen::Index>(v);
}

std::vector<double> get_numbers(const json& p, const std::string& key,
                                const std::vector<double>& fallback) {
  if (!p.contains(key)) return fallback;
  const json& arr = p.at(key);
  if (!arr.is_array()) throw SchemaError(at(key), "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_number()) throw SchemaError(at(key) + "/" + std::to_string(i), "expected a number");
    out.push_back(arr[i].get<double>());
  }
  return out;
}

CellSet get_cells(const json& p, const std::string& key, std::size_t n) {
  return cells_from_json(require_field(p, key, ""), n, at(key));
}

void require_same_dim(Eigen::Index a, Eigen::Index b, const std::string& key) {
  if (a != b) throw SchemaError(at(key), "dimension mismatch");
}

// Sub-reports are folded into one report named after the check.
void fold(CheckReport& into, const CheckReport& part) { into.merge(part); }

void add_expectation(CheckReport& r, const json& p, const std::string& residual, double value,
                     double tol) {
  if (!p.contains("expect")) return;
  const double want = get_number(p, "expect", "");
  r.info("expected_" + residual, want).at_most(residual + "_expect_error", std::abs(value - want), tol);
}

// All k-subsets of {0..n-1} in lexicographic order.
std::vector<CellSet> k_subsets(std::size_t n, std::size_t k) {
  std::vector<CellSet> out;
  if (k > n) return out;
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    out.emplace_back(n, idx);
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
    if (i == 0) break;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
  return out;
}

CellSet subset_by_mask(const CellSet& base, std::uint64_t mask) {
  std::vector<std::size_t> pick;
  for (std::size_t i = 0; i < base.size(); ++i) {
    if (mask >> i & 1U) pick.push_back(base.cells()[i]);
  }
  return CellSet(base.lattice_size(), std::move(pick));
}

CellSet random_subset(Rng& rng, const CellSet& base) {
  std::vector<std::size_t> pick;
  for (std::size_t k : base.cells()) {
    if (rng.uniform() < 0.5) pick.push_back(k);
  }
  return CellSet(base.lattice_size(), std::move(pick));
}

double effect_bound_violation(const Matrix& b) {
  const RealVector ev = hermitian_eigenvalues(b);
  return std::max({0.0, -ev.minCoeff(), ev.maxCoeff() - 1.0});
}

// ---------------------------------------------------------------------------
// measurement-causality checks

CheckReport check_nsc(const json& p, Rng& rng, double tol) {
  const Eigen::Index dim = get_dim(p, "dim", 3);
  const KrausInstrument instr =
      p.contains("instrument")
          ? instrument_from_json(p.at("instrument"), at("instrument"))
          : random_instrument(rng, dim, get_count(p, "outcomes", 2), get_count(p, "kraus", 1));
  const Effect s = p.contains("effect") ? effect_from_json(p.at("effect"), at("effect"))
                                        : random_effect(rng, instr.dim());
  require_same_dim(instr.dim(), s.dim(), "effect");

  const double nsc = nsc_deviation(instr, s);
  const Matrix x = hermitian_part(dual_map(instr, s.matrix()) - s.matrix());
  const Spectrum spec = hermitian_eig(x);
  Eigen::Index top = 0;
  spec.values.cwiseAbs().maxCoeff(&top);
  const DensityState extremal = DensityState::pure(spec.vectors.col(top));

  // Schroedinger-picture route: |tr(rho^T S) - tr(rho S)| for explicit states.
  auto shift = [&](const DensityState& rho) {
    const DensityState post = nonselective_post_state(rho, instr);
    return std::abs((post.matrix() * s.matrix()).trace().real() -
                    (rho.matrix() * s.matrix()).trace().real());
  };
  double excess = -nsc;
  const std::size_t states = get_count(p, "states", 100);
  for (std::size_t i = 0; i < states; ++i) excess = std::max(excess, shift(random_state(rng, instr.dim())) - nsc);

  CheckReport r("nsc");
  r.info("nsc_deviation", nsc)
      .at_most("state_excess", std::max(0.0, excess), 1e-9)
      .at_most("extremal_gap", std::abs(shift(extremal) - nsc), 1e-9);
  add_expectation(r, p, "nsc_deviation", nsc, tol);
  return r;
}

CheckReport check_rcc(const json& p, Rng& rng, double tol) {
  const Eigen::Index dim = get_dim(p, "dim", 3);
  auto load = [&](const std::string& key) {
    if (p.contains(key)) return instrument_from_json(p.at(key), at(key));
    return luders_instrument(random_povm(rng, dim, get_count(p, "outcomes", 2)));
  };
  const KrausInstrument first = load("first");
  const KrausInstrument second = load("second");
  require_same_dim(first.dim(), second.dim(), "second");
  if (!first.efficient()) throw SchemaError(at("first"), "instrument is not efficient");
  if (!second.efficient()) throw SchemaError(at("second"), "instrument is not efficient");

  const double ab = rcc_deviation(first, second);
  const double ba = rcc_deviation(second, first);
  double excess = 0.0;
  const std::size_t states = get_count(p, "states", 100);
  for (std::size_t n = 0; n < states; ++n) {
    const DensityState rho = random_state(rng, first.dim());
    for (std::size_t j = 0; j < first.outcomes(); ++j) {
      for (std::size_t i = 0; i < second.outcomes(); ++i) {
        const double p_ji = sequential_joint_prob(rho, first, j, second.povm()[i]);
        const double p_ij = sequential_joint_prob(rho, second, i, first.povm()[j]);
        excess = std::max(excess, std::abs(p_ji - p_ij) - ab);
      }
    }
  }
  CheckReport r("rcc");
  r.info("rcc_deviation", ab)
      .at_most("symmetry", std::abs(ab - ba), 1e-12)
      .at_most("sequential_excess", excess, 1e-9)
      .note(kRccProductFormNote);
  add_expectation(r, p, "rcc_deviation", ab, tol);
  return r;
}

std::pair<DiscretePOVM, DiscretePOVM> qubit_bases() {
  const double h = 0.5;
  Matrix p0 = Matrix::Zero(2, 2), p1 = Matrix::Zero(2, 2);
  p0(0, 0) = 1.0;
  p1(1, 1) = 1.0;
  Matrix plus(2, 2), minus(2, 2);
  plus << h, h, h, h;
  minus << h, -h, -h, h;
  return {DiscretePOVM({p0, p1}, {"0", "1"}), DiscretePOVM({plus, minus}, {"+", "-"})};
}

CheckReport check_luders_equivalence(const json& p, Rng& rng, double tol) {
  CheckReport r("luders_equivalence");
  r.note(kRccProductFormNote);
  if (p.contains("first") || p.contains("second")) {
    const DiscretePOVM t = povm_from_json(require_field(p, "first", ""), at("first"));
    const DiscretePOVM s = povm_from_json(require_field(p, "second", ""), at("second"));
    require_same_dim(t.dim(), s.dim(), "second");
    return luders_equivalence_check(t, s, tol).report;
  }
  const std::string family = get_string(p, "family", "", "commuting");
  const std::size_t count = get_count(p, "count", 100);
  const Eigen::Index dmin = get_dim(p, "dim_min", 2);
  const Eigen::Index dmax = get_dim(p, "dim_max", 5);
  if (dmax < dmin) throw SchemaError(at("dim_max"), "dim_max < dim_min");
  auto draw_dim = [&] { return dmin + static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(dmax - dmin + 1))); };

  if (family == "qubit") {
    const auto [t, s] = qubit_bases();
    return luders_equivalence_check(t, s, tol).report;
  }
  if (family == "commuting") {
    double max_nsc = 0.0, max_rcc = 0.0, max_comm = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
      const Eigen::Index d = draw_dim();
      const PovmPair pair = commuting_pair(rng, d, 2 + rng.index(3), 2 + rng.index(3));
      const DeviationReport dev = luders_equivalence_check(pair.first, pair.second, tol);
      max_nsc = std::max(max_nsc, dev.nsc_dev);
      max_rcc = std::max(max_rcc, dev.rcc_dev);
      max_comm = std::max(max_comm, dev.commutator_residual);
      fold(r, dev.report);
    }
    r.at_most("max_nsc", max_nsc, tol)
        .at_most("max_rcc", max_rcc, tol)
        .at_most("max_commutator", max_comm, tol)
        .info("instances", static_cast<double>(count));
    return r;
  }
  if (family == "random") {
    const double min_comm = get_number(p, "min_commutator", "", 0.1);
    const double floor = get_number(p, "nsc_floor", "", 1e-8);
    std::size_t qualified = 0, attempts = 0, below = 0;
    double min_nsc = INFINITY;
    while (qualified < count && attempts < 20 * count + 20) {
      ++attempts;
      const Eigen::Index d = draw_dim();
      const DiscretePOVM t = random_povm(rng, d, 2 + rng.index(2));
      const DiscretePOVM s = random_povm(rng, d, 2 + rng.index(2));
      const DeviationReport dev = luders_equivalence_check(t, s, tol);
      if (dev.commutator_residual < min_comm) continue;
      ++qualified;
      fold(r, dev.report);
      min_nsc = std::min(min_nsc, dev.nsc_dev);
      if (dev.nsc_dev < floor) {
        // Recheck on the Frobenius route, which shares no code with op_norm.
        const KrausInstrument lt = luders_instrument(t);
        double recheck = 0.0, comm_f = 0.0;
        for (const auto& si : s.effects()) {
          recheck = std::max(recheck, (dual_map(lt, si.matrix()) - si.matrix()).norm());
          for (const auto& tj : t.effects()) comm_f = std::max(comm_f, commutator(tj.matrix(), si.matrix()).norm());
        }
        ++below;
        r.note("below-floor sample " + std::to_string(qualified - 1) + ": commutator " +
               std::to_string(dev.commutator_residual) + " (Frobenius " + std::to_string(comm_f) +
               "), nsc " + std::to_string(dev.nsc_dev) + " (Frobenius " + std::to_string(recheck) + ")");
      }
    }
    r.at_least("qualified", static_cast<double>(qualified), static_cast<double>(count))
        .at_least("min_nsc", min_nsc, floor)
        .info("below_floor", static_cast<double>(below))
        .info("attempts", static_cast<double>(attempts));
    return r;
  }
  throw SchemaError(at("family"), "expected 'commuting', 'random' or 'qubit'");
}

CheckReport check_beck(const json& p, Rng& rng, double tol) {
  if (p.contains("instrument")) {
    const KrausInstrument instr = instrument_from_json(p.at("instrument"), at("instrument"));
    const Effect s = effect_from_json(require_field(p, "effect", ""), at("effect"));
    require_same_dim(instr.dim(), s.dim(), "effect");
    return beck_check(instr, s, tol).report;
  }
  const std::string family = get_string(p, "family", "", "commuting");
  if (family == "hw_example") {
    const InstrumentEffect ex = heinosaari_wolf_example();
    return beck_check(ex.instrument, ex.effect, tol).report;
  }
  const std::size_t count = get_count(p, "count", 100);
  const Eigen::Index dmin = get_dim(p, "dim_min", 2);
  const Eigen::Index dmax = get_dim(p, "dim_max", 5);
  if (dmax < dmin) throw SchemaError(at("dim_max"), "dim_max < dim_min");
  CheckReport r("beck");
  if (family != "commuting" && family != "random") {
    throw SchemaError(at("family"), "expected 'commuting', 'random' or 'hw_example'");
  }
  const double kappa_cut = get_number(p, "kappa_cut", "", 1e-12);
  double fwd_d1 = 0.0, fwd_d2 = 0.0, max_kappa = 0.0, min_d1 = INFINITY;
  std::size_t forward = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const Eigen::Index d = dmin + static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(dmax - dmin + 1)));
    const std::size_t outcomes = 2 + rng.index(2);
    const std::size_t kraus = 1 + rng.index(2);
    InstrumentEffect inst = family == "commuting"
                                ? commuting_instrument(rng, d, outcomes, kraus)
                                : InstrumentEffect{random_instrument(rng, d, outcomes, kraus), random_effect(rng, d)};
    const DeviationReport dev = beck_check(inst.instrument, inst.effect, tol);
    fold(r, dev.report);
    max_kappa = std::max(max_kappa, dev.kraus_commutator_residual);
    min_d1 = std::min(min_d1, dev.nsc_dev);
    if (dev.kraus_commutator_residual <= kappa_cut) {
      ++forward;
      fwd_d1 = std::max(fwd_d1, dev.nsc_dev);
      fwd_d2 = std::max(fwd_d2, dev.nsc_sq_dev);
    }
  }
  r.info("instances", static_cast<double>(count))
      .info("forward_instances", static_cast<double>(forward))
      .info("max_kappa", max_kappa)
      .info("min_d1", min_d1)
      .at_most("forward_d1", fwd_d1, tol)
      .at_most("forward_d2", fwd_d2, tol);
  return r;
}

CheckReport check_hw_search(const json& p, std::uint64_t seed, double) {
  HWSearchOptions opts;
  opts.restarts = get_count(p, "restarts", opts.restarts);
  opts.threads = static_cast<unsigned>(get_count(p, "threads", 1));
  opts.d1_target = get_number(p, "d1_target", "", opts.d1_target);
  opts.d2_target = get_number(p, "d2_target", "", opts.d2_target);
  const std::size_t budget = get_count(p, "budget", 100000);

  std::vector<std::uint64_t> seeds;
  if (p.contains("seeds")) {
    const json& arr = p.at("seeds");
    if (!arr.is_array()) throw SchemaError(at("seeds"), "expected an array of integers");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      if (!arr[i].is_number_unsigned()) throw SchemaError(at("seeds") + "/" + std::to_string(i), "expected an unsigned integer");
      seeds.push_back(arr[i].get<std::uint64_t>());
    }
  } else {
    seeds.push_back(seed);
  }
  std::vector<double> dims = get_numbers(p, "dims", {static_cast<double>(get_dim(p, "dim", 3))});
  if (dims.empty()) throw SchemaError(at("dims"), "expected at least one dimension");

  CheckReport r("hw_search");
  std::size_t found = 0, evaluations = 0;
  double worst_d1 = 0.0, worst_d2 = INFINITY;
  bool rechecked = true;
  json runs = json::array();
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    const auto d = static_cast<Eigen::Index>(dims[i % dims.size()]);
    const auto w = heinosaari_wolf_search(d, seeds[i], budget, opts);
    if (!w) {
      r.note("NOT_FOUND for seed " + std::to_string(seeds[i]) + " at dim " + std::to_string(d) +
             "; increase the budget");
      runs.push_back({{"seed", seeds[i]}, {"dim", d}, {"found", false}});
      continue;
    }
    ++found;
    evaluations += w->evaluations;
    worst_d1 = std::max(worst_d1, w->d1);
    worst_d2 = std::min(worst_d2, w->d2);
    rechecked = rechecked && accept_witness(w->instrument, w->effect, opts);
    runs.push_back({{"seed", seeds[i]}, {"dim", d}, {"found", true}, {"d1", w->d1}, {"d2", w->d2},
                    {"evaluations", w->evaluations}});
    if (!r.witnesses().contains("instrument")) {
      r.witnesses()["instrument"] = to_json(w->instrument);
      r.witnesses()["effect"] = to_json(w->effect);
    }
  }
  r.witnesses()["runs"] = runs;
  r.info("searches", static_cast<double>(seeds.size()))
      .at_least("found", static_cast<double>(found), 1.0)
      .info("evaluations", static_cast<double>(evaluations))
      .require("witness_recheck", rechecked);
  if (found > 0) {
    r.at_most("witness_d1", worst_d1, opts.d1_target).at_least("witness_d2", worst_d2, opts.d2_target);
  }
  return r;
}

// ---------------------------------------------------------------------------
// localization-models checks

std::vector<CellSet> get_cell_list(const json& p, const std::string& key, std::size_t n,
                                   const std::vector<CellSet>& fallback) {
  if (!p.contains(key)) return fallback;
  const json& arr = p.at(key);
  if (!arr.is_array()) throw SchemaError(at(key), "expected an array of cell lists");
  std::vector<CellSet> out;
  for (std::size_t i = 0; i < arr.size(); ++i) {
    out.push_back(cells_from_json(arr[i], n, at(key) + "/" + std::to_string(i)));
  }
  return out;
}

CheckReport check_hc_audit(const json& p, double tol) {
  const LatticeLocalizationSystem sys = system_from_json(p, "");
  const std::size_t n = sys.n;
  const auto samples = get_cell_list(
      p, "delta_samples", n,
      {CellSet(n, {0}), CellSet(n, {n / 2}), CellSet::interval(n, 0, 2), CellSet::interval(n, n / 2, 2)});
  const auto t_grid = get_numbers(p, "t_grid", {0.25, 0.5, 1.0});
  HCAuditReport audit = hc_audit(sys, samples, t_grid, tol);
  CheckReport r = audit.report;
  r.witnesses()["failing_hypotheses"] = audit.failing;
  r.witnesses()["verdict"] = audit.consistency_verdict;
  if (audit.microcausality_witness) {
    const auto& w = *audit.microcausality_witness;
    r.witnesses()["microcausality"] = {{"delta", to_json(w.delta)},
                                       {"delta_prime", to_json(w.delta_prime)},
                                       {"t", w.t},
                                       {"residual", w.residual}};
  }
  if (p.contains("expect_verdict")) {
    const std::string want = get_string(p, "expect_verdict", "", "");
    r.require("expected_verdict", audit.consistency_verdict.find(want) != std::string::npos);
  }
  return r;
}

CheckReport check_cc_residual(const json& p, double tol) {
  const LatticeLocalizationSystem sys = system_from_json(p, "");
  const auto deltas = p.contains("delta") ? std::vector<CellSet>{get_cells(p, "delta", sys.n)}
                                          : get_cell_list(p, "deltas", sys.n, {CellSet(sys.n, {0})});
  const auto times = p.contains("t") ? std::vector<double>{get_number(p, "t", "")}
                                     : get_numbers(p, "times", {0.5});
  CheckReport r("cc_residual");
  double worst = INFINITY;
  std::size_t saturated = 0;
  for (const auto& d : deltas) {
    for (double t : times) {
      const CCResult cc = cc_residual(sys, d, t);
      if (cc.saturated) ++saturated;
      if (cc.residual < worst) {
        worst = cc.residual;
        r.witnesses()["delta"] = to_json(d);
        r.witnesses()["t"] = t;
        r.witnesses()["shadow"] = to_json(cc.shadow);
        r.witnesses()["saturated"] = cc.saturated;
      }
    }
  }
  if (saturated > 0) r.note("SATURATED: causal shadow covers the lattice for some (Delta, t)");
  r.info("min_residual", worst).info("saturated", static_cast<double>(saturated));
  const std::string expect = get_string(p, "expect", "", "any");
  if (expect == "violated") {
    r.at_most("violation", worst, -get_number(p, "margin", "", 0.01));
  } else if (expect == "holds") {
    r.at_least("cc_holds", worst, -tol);
  } else if (expect != "any") {
    throw SchemaError(at("expect"), "expected 'violated', 'holds' or 'any'");
  }
  return r;
}

CheckReport check_projector_identity(const json& p, Rng& rng, double tol) {
  if (p.contains("p")) {
    const Effect pp = effect_from_json(p.at("p"), at("p"));
    const Effect q = effect_from_json(require_field(p, "q", ""), at("q"));
    const Effect rr = effect_from_json(require_field(p, "r", ""), at("r"));
    return projector_identity(pp, q, rr, tol);
  }
  const std::size_t count = get_count(p, "count", 100);
  const Eigen::Index dmin = get_dim(p, "dim_min", 3);
  const Eigen::Index dmax = get_dim(p, "dim_max", 8);
  if (dmax < dmin) throw SchemaError(at("dim_max"), "dim_max < dim_min");
  CheckReport r("projector_identity");
  for (std::size_t i = 0; i < count; ++i) {
    const Eigen::Index d = dmin + static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(dmax - dmin + 1)));
    const Matrix u = haar_unitary(rng, d);
    const auto q_rank = static_cast<Eigen::Index>(1 + rng.index(static_cast<std::size_t>(d - 1)));
    const auto p_rank = static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(q_rank + 1)));
    const auto r_rank = static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(d - q_rank + 1)));
    auto proj = [&](Eigen::Index from, Eigen::Index count_cols) {
      const Matrix cols = u.middleCols(from, count_cols);
      return Effect::unchecked(hermitian_part(cols * cols.adjoint()));
    };
    fold(r, projector_identity(proj(0, p_rank), proj(0, q_rank), proj(q_rank, r_rank), tol));
  }
  r.info("instances", static_cast<double>(count));
  return r;
}

// ---------------------------------------------------------------------------
// conditional-povm checks

CheckReport check_conditional_build(const json& p, Rng& rng, double tol) {
  const LatticeLocalizationSystem sys = system_from_json(p, "");
  const std::size_t n = sys.n;
  std::vector<CellSet> labs;
  const bool single = p.contains("delta0");
  if (single) {
    labs.push_back(get_cells(p, "delta0", n));
  } else {
    for (double k : get_numbers(p, "sizes", {4, 6, 8})) {
      if (k < 1 || k > static_cast<double>(n)) throw SchemaError(at("sizes"), "lab size out of range");
      const auto subs = k_subsets(n, static_cast<std::size_t>(k));
      labs.insert(labs.end(), subs.begin(), subs.end());
    }
  }
  const std::size_t states = get_count(p, "states", 100);
  const std::size_t identity_labs = get_count(p, "identity_labs", 2);
  const std::size_t partition_samples = get_count(p, "partition_samples", 4);
  const std::size_t full_partition_labs = get_count(p, "full_partition_labs", 1);
  const bool expect_refusal = p.value("expect_refusal", false);

  CheckReport r("conditional_build");
  double norm_res = 0.0, add_res = 0.0, bound_res = 0.0, ident_res = 0.0;
  double min_kernel = INFINITY;
  std::size_t built = 0, refused = 0;
  std::map<std::size_t, std::size_t> identity_done, partitions_done;
  for (const auto& lab : labs) {
    std::optional<ConditionalPOVM> cond;
    try {
      cond.emplace(build_conditional(sys, lab));
    } catch (const std::domain_error& e) {
      ++refused;
      if (single) r.note(std::string("refused: ") + e.what());
      continue;
    }
    ++built;
    min_kernel = std::min(min_kernel, cond->kernel_min_eig());
    const Matrix b0 = cond->effect(lab).matrix();
    norm_res = std::max(norm_res, op_norm(b0 - identity(sys.dim())));

    Matrix singles = Matrix::Zero(sys.dim(), sys.dim());
    for (std::size_t k : lab.cells()) {
      const Matrix bk = cond->effect(CellSet(n, {k})).matrix();
      singles += bk;
      bound_res = std::max(bound_res, effect_bound_violation(bk));
    }
    add_res = std::max(add_res, op_norm(singles - b0));
    auto partition = [&](const CellSet& part) {
      const Matrix bp = cond->effect(part).matrix();
      const Matrix bq = cond->effect(lab.minus(part)).matrix();
      add_res = std::max(add_res, op_norm(bp + bq - b0));
      bound_res = std::max({bound_res, effect_bound_violation(bp), effect_bound_violation(bq)});
    };
    if (partitions_done[lab.size()] < full_partition_labs && lab.size() < 20) {
      ++partitions_done[lab.size()];
      // Fixing the last cell on one side enumerates every unordered 2-partition once.
      for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << (lab.size() - 1)); ++mask) {
        partition(subset_by_mask(lab, mask));
      }
    } else {
      for (std::size_t i = 0; i < partition_samples; ++i) partition(random_subset(rng, lab));
    }
    if (identity_done[lab.size()] < identity_labs) {
      ++identity_done[lab.size()];
      const Matrix a0 = effect_of(sys, lab).matrix();
      for (std::size_t i = 0; i < states; ++i) {
        const DensityState rho = random_state(rng, sys.dim());
        const CellSet sub = random_subset(rng, lab);
        const double p0 = (rho.matrix() * a0).trace().real();
        const Matrix rho_lab = cond->sqrt_lab() * rho.matrix() * cond->sqrt_lab() / p0;
        const double lhs = (rho_lab * cond->effect(sub).matrix()).trace().real();
        const double rhs = (rho.matrix() * effect_of(sys, sub).matrix()).trace().real() / p0;
        ident_res = std::max(ident_res, std::abs(lhs - rhs));
      }
    }
  }
  r.info("labs", static_cast<double>(labs.size()))
      .info("constructible", static_cast<double>(built))
      .info("refused", static_cast<double>(refused));
  if (expect_refusal) {
    r.require("refused_as_expected", built == 0);
    return r;
  }
  if (built == 0) return r.require("constructible", false).note("no lab was constructible");
  r.info("min_kernel_eig", min_kernel)
      .at_most("normalization", norm_res, tol)
      .at_most("additivity", add_res, tol)
      .at_most("effect_bounds", bound_res, tol)
      .at_most("conditional_identity", ident_res, tol);
  return r;
}

CheckReport check_gentle_sweep(const json& p, Rng& rng, double) {
  const std::size_t count = get_count(p, "count", 10000);
  const Eigen::Index dmin = get_dim(p, "dim_min", 2);
  const Eigen::Index dmax = get_dim(p, "dim_max", 8);
  if (dmax < dmin) throw SchemaError(at("dim_max"), "dim_max < dim_min");
  const double near_singular = get_number(p, "near_singular_fraction", "", 0.25);

  CheckReport r("gentle_sweep");
  double min_margin = INFINITY, max_delta = 0.0;
  // count is the number of evaluated instances; draws whose outcome
  // probability is at the floor are redrawn, up to a fixed cap.
  std::size_t violations = 0, rejected = 0, singular = 0, evaluated = 0;
  for (std::size_t draw = 0; evaluated < count && draw < 10 * count + 100; ++draw) {
    const Eigen::Index d = dmin + static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(dmax - dmin + 1)));
    const Matrix u = haar_unitary(rng, d);
    RealVector lambda(d);
    const bool tiny = rng.uniform() < near_singular;
    for (Eigen::Index k = 0; k < d; ++k) {
      lambda(k) = tiny && rng.uniform() < 0.5 ? std::pow(10.0, -rng.uniform(6.0, 14.0)) : rng.uniform();
    }
    const Effect t = Effect::unchecked(hermitian_part(u * lambda.cast<Complex>().asDiagonal() * u.adjoint()));
    const Eigen::Index rank = 1 + static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(d)));
    const DensityState rho = random_state(rng, d, rank);
    if (!((rho.matrix() * t.matrix()).trace().real() > kProbFloor)) {
      ++rejected;
      continue;
    }
    ++evaluated;
    if (tiny) ++singular;
    const GentleBoundReport g = gentle_bound(t, rho);
    min_margin = std::min(min_margin, g.margin);
    max_delta = std::max(max_delta, g.delta);
    if (g.margin < -1e-9) {
      ++violations;
      if (!r.witnesses().contains("violation")) {
        r.witnesses()["violation"] = {{"t", to_json(t)}, {"rho", to_json(rho)}, {"margin", g.margin}};
      }
    }
  }
  r.at_least("instances", static_cast<double>(evaluated), static_cast<double>(count))
      .info("near_singular", static_cast<double>(singular))
      .info("rejected", static_cast<double>(rejected))
      .info("max_delta", max_delta)
      .at_least("min_margin", min_margin, -1e-9)
      .at_most("violations", static_cast<double>(violations), 0.0);
  return r;
}

CheckReport check_conditional_bound(const json& p, Rng& rng, double) {
  const LatticeLocalizationSystem sys = system_from_json(p, "");
  const CellSet lab = get_cells(p, "delta0", sys.n);
  const std::string state = get_string(p, "state", "", "localized");
  DensityState rho;
  if (p.contains("rho")) {
    rho = state_from_json(p.at("rho"), at("rho"));
    require_same_dim(rho.dim(), sys.dim(), "rho");
  } else if (state == "maximally_mixed") {
    rho = DensityState::unchecked(identity(sys.dim()) / static_cast<double>(sys.n));
  } else if (state == "random") {
    rho = random_state(rng, sys.dim());
  } else if (state == "localized") {
    rho = localized_state(sys, lab, get_number(p, "threshold", "", 0.99));
  } else {
    throw SchemaError(at("state"), "expected 'localized', 'random' or 'maximally_mixed'");
  }
  std::vector<CellSet> deltas;
  if (p.contains("delta")) {
    deltas.push_back(get_cells(p, "delta", sys.n));
  } else {
    const std::uint64_t total = std::uint64_t{1} << std::min<std::size_t>(lab.size(), 20);
    const std::uint64_t stride = std::max<std::uint64_t>(1, total / 256);
    for (std::uint64_t mask = 0; mask < total; mask += stride) deltas.push_back(subset_by_mask(lab, mask));
    deltas.push_back(lab);
  }
  CheckReport r("conditional_bound");
  for (const auto& d : deltas) fold(r, conditional_prob_bound(sys, d, lab, rho));
  r.info("subsets", static_cast<double>(deltas.size()));
  if (p.contains("max_delta")) r.at_most("delta_target", r.value("delta"), get_number(p, "max_delta", ""));
  return r;
}

CheckReport check_composition(const json& p, double) {
  const LatticeLocalizationSystem sys = system_from_json(p, "");
  CheckReport r = composition_identity_check(sys, get_cells(p, "delta0", sys.n),
                                             get_cells(p, "delta0_prime", sys.n));
  const std::string expect = get_string(p, "expect_additivity_failure", "", "any");
  const double failure = r.value("cross_lab_additivity_failure");
  if (expect == "positive") {
    r.at_least("additivity_failure_positive", failure, get_number(p, "failure_floor", "", 1e-6));
  } else if (expect == "zero") {
    r.at_most("additivity_failure_zero", failure, 1e-12);
  } else if (expect != "any") {
    throw SchemaError(at("expect_additivity_failure"), "expected 'positive', 'zero' or 'any'");
  }
  return r;
}

CheckReport check_cross_lab(const json& p, double) {
  const LatticeLocalizationSystem sys_a = system_from_json(p, "");
  const LatticeLocalizationSystem sys_b =
      p.contains("system_b") ? system_from_json(p.at("system_b"), at("system_b")) : sys_a;
  if (p.contains("gaps")) {
    const std::size_t size = get_count(p, "lab_size", 2);
    CheckReport r("cross_lab_commutator");
    json trend = json::array();
    for (double g : get_numbers(p, "gaps", {})) {
      const auto gap = static_cast<std::size_t>(g);
      // Beyond this the labs approach each other through the periodic image.
      if (2 * (size + gap) > sys_a.n) throw SchemaError(at("gaps"), "gap exceeds half the free lattice");
      const CellSet l1 = CellSet::interval(sys_a.n, 0, size);
      const CellSet l2 = CellSet::interval(sys_a.n, size + gap, size);
      const CrossLabCommutator c =
          cross_lab_commutator(sys_a, l1, CellSet(sys_a.n, {0}), sys_b, l2, CellSet(sys_a.n, {size + gap}));
      r.info("commutator_gap_" + std::to_string(gap), c.value);
      trend.push_back({{"gap", gap}, {"distance", c.distance}, {"separated", c.separated}, {"commutator", c.value}});
    }
    r.witnesses()["trend"] = trend;
    return r.note("measurement only: no commutativity verdict is asserted");
  }
  const CellSet d0 = get_cells(p, "delta0", sys_a.n);
  const CellSet d0p = get_cells(p, "delta0_prime", sys_b.n);
  const CellSet d = p.contains("delta") ? get_cells(p, "delta", sys_a.n) : d0;
  const CellSet dp = p.contains("delta_prime") ? get_cells(p, "delta_prime", sys_b.n) : d0p;
  return cross_lab_commutator(sys_a, d0, d, sys_b, d0p, dp).report;
}

// ---------------------------------------------------------------------------
// causal-geometry and validation checks

CheckReport check_separation(const json& p, double) {
  const RegionUnion a = region_from_json(require_field(p, "a", ""), at("a"));
  const RegionUnion b = region_from_json(require_field(p, "b", ""), at("b"));
  if (std::abs(a.frame().t - b.frame().t) > 1e-12 || std::abs(a.frame().x - b.frame().x) > 1e-12 ||
      std::abs(a.frame().y - b.frame().y) > 1e-12 || std::abs(a.frame().z - b.frame().z) > 1e-12) {
    throw SchemaError(at("b") + "/frame", "frame mismatch");
  }
  const double band = get_number(p, "band", "", kLightConeBand);
  const bool ab = causally_separated(a, b, band);
  const bool ba = causally_separated(b, a, band);
  CheckReport r("separation");
  r.info("separated", ab ? 1.0 : 0.0).require("symmetric", ab == ba);
  if (p.contains("expect")) {
    const json& e = p.at("expect");
    if (!e.is_boolean()) throw SchemaError(at("expect"), "expected a boolean");
    r.require("expected_verdict", ab == e.get<bool>());
  }
  return r;
}

CheckReport check_lab_contains(const json& p, double) {
  const SpacetimeBox lab = box_from_json(require_field(p, "lab", ""), at("lab"));
  if (!lab.is_spatial()) throw SchemaError(at("lab"), "laboratory box must be spatial");
  const json& pts = require_field(p, "points", "");
  if (!pts.is_array()) throw SchemaError(at("points"), "expected an array of four-vectors");
  const json* expect = p.contains("expect") ? &p.at("expect") : nullptr;
  if (expect && (!expect->is_array() || expect->size() != pts.size())) {
    throw SchemaError(at("expect"), "expected one boolean per point");
  }
  CheckReport r("lab_contains");
  json verdicts = json::array();
  std::size_t mismatches = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const FourVector v = four_vector_from_json(pts[i], at("points") + "/" + std::to_string(i));
    const bool inside = lab_contains(v, lab);
    verdicts.push_back(inside);
    if (expect && (*expect)[i].get<bool>() != inside) ++mismatches;
  }
  r.witnesses()["inside"] = verdicts;
  r.info("points", static_cast<double>(pts.size()));
  if (expect) r.at_most("mismatches", static_cast<double>(mismatches), 0.0);
  return r;
}

CheckReport check_validate(const json& p, double tol) {
  const json& obj = require_field(p, "object", "");
  const std::string type = get_string(obj, "type", at("object"), "");
  const std::string path = at("object");
  auto matrix = [&] { return matrix_from_json(require_field(obj, "matrix", path), path + "/matrix"); };
  if (type == "effect") return validate_effect_matrix(matrix(), tol);
  if (type == "state") return validate_state_matrix(matrix(), tol);
  if (type == "povm" || type == "instrument") {
    // Validation must not throw on bad data, so build unchecked wrappers.
    ValidationOptions opts;
    opts.tol = tol;
    if (type == "povm") {
      const json& effects = require_field(obj, "effects", path);
      std::vector<Effect> es;
      for (std::size_t i = 0; i < effects.size(); ++i) {
        es.push_back(Effect::unchecked(matrix_from_json(effects[i], path + "/effects/" + std::to_string(i))));
      }
      return validate(DiscretePOVM::unchecked(std::move(es)), opts);
    }
    const json& outcomes = require_field(obj, "outcomes", path);
    if (!outcomes.is_array()) throw SchemaError(path + "/outcomes", "expected an array");
    std::vector<std::vector<Matrix>> families;
    std::vector<std::string> labels;
    for (std::size_t j = 0; j < outcomes.size(); ++j) {
      const std::string op = path + "/outcomes/" + std::to_string(j);
      const json& kraus = require_field(outcomes[j], "kraus", op);
      if (!kraus.is_array()) throw SchemaError(op + "/kraus", "expected an array");
      families.emplace_back();
      for (std::size_t k = 0; k < kraus.size(); ++k) {
        families.back().push_back(matrix_from_json(kraus[k], op + "/kraus/" + std::to_string(k)));
      }
      labels.push_back(get_string(outcomes[j], "label", op, std::to_string(j)));
    }
    ValidationOptions loose;
    loose.tol = INFINITY;
    loose.require_nonzero = false;
    KrausInstrument instr;
    try {
      instr = KrausInstrument(std::move(families), std::move(labels), loose);
    } catch (const std::invalid_argument& e) {
      throw SchemaError(path, e.what());
    }
    return validate(instr, opts);
  }
  if (type == "lattice_system") return validate(system_from_json(obj, path), tol);
  throw SchemaError(path + "/type", "expected effect, state, povm, instrument or lattice_system");
}

using CheckFn = CheckReport (*)(const json&, Rng&, std::uint64_t, double);

const std::map<std::string, CheckFn>& registry() {
  static const std::map<std::string, CheckFn> table = {
      {"nsc", [](const json& p, Rng& g, std::uint64_t, double t) { return check_nsc(p, g, t); }},
      {"rcc", [](const json& p, Rng& g, std::uint64_t, double t) { return check_rcc(p, g, t); }},
      {"luders_equivalence",
       [](const json& p, Rng& g, std::uint64_t, double t) { return check_luders_equivalence(p, g, t); }},
      {"beck", [](const json& p, Rng& g, std::uint64_t, double t) { return check_beck(p, g, t); }},
      {"hw_search", [](const json& p, Rng&, std::uint64_t s, double t) { return check_hw_search(p, s, t); }},
      {"hc_audit", [](const json& p, Rng&, std::uint64_t, double t) { return check_hc_audit(p, t); }},
      {"cc_residual", [](const json& p, Rng&, std::uint64_t, double t) { return check_cc_residual(p, t); }},
      {"projector_identity", [](const json& p, Rng& g, std::uint64_t, double t) { return check_projector_identity(p, g, t); }},
      {"conditional_build",
       [](const json& p, Rng& g, std::uint64_t, double t) { return check_conditional_build(p, g, t); }},
      {"gentle_sweep", [](const json& p, Rng& g, std::uint64_t, double t) { return check_gentle_sweep(p, g, t); }},
      {"conditional_bound",
       [](const json& p, Rng& g, std::uint64_t, double t) { return check_conditional_bound(p, g, t); }},
      {"composition", [](const json& p, Rng&, std::uint64_t, double t) { return check_composition(p, t); }},
      {"cross_lab_commutator", [](const json& p, Rng&, std::uint64_t, double t) { return check_cross_lab(p, t); }},
      {"separation", [](const json& p, Rng&, std::uint64_t, double t) { return check_separation(p, t); }},
      {"lab_contains", [](const json& p, Rng&, std::uint64_t, double t) { return check_lab_contains(p, t); }},
      {"validate", [](const json& p, Rng&, std::uint64_t, double t) { return check_validate(p, t); }},
  };
  return table;
}

std::string prefixed(const std::string& base, const std::string& pointer) {
  return pointer.empty() || pointer == "/" ? base : base + pointer;
}

}  // namespace

const std::vector<std::string>& check_types() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, fn] : registry()) out.push_back(name);
    return out;
  }();
  return names;
}

LatticeLocalizationSystem system_from_json(const json& j, const std::string& path) {
  const std::int64_t n = get_int(j, "n", path, 16);
  if (n < 2 || n > 64) throw SchemaError(path + "/n", "n must be in [2, 64]");
  const double mass = get_number(j, "mass", path, 1.0);
  const double a = get_number(j, "a", path, 1.0);
  const std::string kind_name = get_string(j, "kind", path, "sharp");
  SystemKind kind;
  try {
    kind = parse_system_kind(kind_name);
  } catch (const std::invalid_argument& e) {
    throw SchemaError(path + "/kind", e.what());
  }
  const double width = get_number(j, "width", path, 1.5);
  const double coherence = get_number(j, "coherence", path, 1.0);
  LatticeLocalizationSystem sys;
  try {
    switch (kind) {
      case SystemKind::Sharp: sys = build_sharp_system(static_cast<std::size_t>(n), mass, a); break;
      case SystemKind::FrameSmeared:
        sys = build_frame_smeared_system(static_cast<std::size_t>(n), mass, a, width, coherence);
        break;
      case SystemKind::DiagonalSmeared:
        sys = build_diagonal_smeared_system(static_cast<std::size_t>(n), mass, a, width);
        break;
    }
  } catch (const std::invalid_argument& e) {
    throw SchemaError(path.empty() ? "/" : path, e.what());
  } catch (const std::domain_error& e) {
    throw SchemaError(path + "/width", e.what());
  }
  const std::string spectrum = get_string(j, "spectrum", path, "positive");
  if (spectrum == "sign_alternating") {
    sys = with_sign_alternating_spectrum(sys);
  } else if (spectrum == "frozen") {
    sys = with_hamiltonian(sys, Matrix::Zero(sys.dim(), sys.dim()));
  } else if (spectrum != "positive") {
    throw SchemaError(path + "/spectrum", "expected 'positive', 'sign_alternating' or 'frozen'");
  }
  return sys;
}

DensityState localized_state(const LatticeLocalizationSystem& sys, const CellSet& delta0,
                             double threshold) {
  if (delta0.empty()) throw std::domain_error("localized_state: empty lab");
  // Packet centred on the middle cell of the lab as listed.
  const double centre = static_cast<double>(delta0.cells()[delta0.size() / 2]);
  const double spread = std::max(1.0, static_cast<double>(delta0.size()) / 4.0);
  Vector psi(sys.dim());
  for (std::size_t j = 0; j < sys.n; ++j) {
    double d = std::abs(static_cast<double>(j) - centre);
    d = std::min(d, static_cast<double>(sys.n) - d);
    psi(static_cast<Eigen::Index>(j)) = std::exp(-d * d / (4.0 * spread * spread));
  }
  const Spectrum s = hermitian_eig(effect_of(sys, delta0).matrix());
  const double cut = threshold * s.values.maxCoeff();
  Vector projected = Vector::Zero(sys.dim());
  for (Eigen::Index k = 0; k < s.values.size(); ++k) {
    if (s.values(k) >= cut) projected += s.vectors.col(k) * (s.vectors.col(k).adjoint() * psi)(0);
  }
  if (!(projected.norm() > 1e-12)) {
    throw std::domain_error("localized_state: no spectral weight of A(Delta0) above the threshold");
  }
  return DensityState::pure(projected);
}

std::vector<Scenario> parse_scenarios(const json& doc, const RunOptions& opts) {
  const json* list = &doc;
  std::string base;
  std::uint64_t master = 0;
  std::optional<double> doc_tol;
  if (doc.is_object()) {
    if (doc.contains("seed")) {
      if (!doc.at("seed").is_number_unsigned()) throw SchemaError("/seed", "expected an unsigned integer");
      master = doc.at("seed").get<std::uint64_t>();
    }
    if (doc.contains("tol")) doc_tol = get_number(doc, "tol", "");
    list = &require_field(doc, "scenarios", "");
    base = "/scenarios";
  }
  if (!list->is_array()) throw SchemaError(base.empty() ? "/" : base, "expected an array of scenarios");
  if (opts.seed) master = *opts.seed;

  std::vector<Scenario> out;
  for (std::size_t i = 0; i < list->size(); ++i) {
    const json& item = (*list)[i];
    const std::string ptr = base + "/" + std::to_string(i);
    if (!item.is_object()) throw SchemaError(ptr, "expected an object");
    Scenario s;
    s.index = i;
    s.pointer = ptr;
    s.type = get_string(item, "type", ptr, "");
    if (!registry().count(s.type)) {
      throw SchemaError(ptr + "/type", s.type.empty() ? "missing check type" : "unknown check type '" + s.type + "'");
    }
    s.name = get_string(item, "name", ptr, s.type + "#" + std::to_string(i));
    s.seed = master;
    if (item.contains("seed")) {
      if (!item.at("seed").is_number_unsigned()) throw SchemaError(ptr + "/seed", "expected an unsigned integer");
      s.seed = item.at("seed").get<std::uint64_t>();
    }
    s.tol = doc_tol.value_or(kDefaultTol);
    if (item.contains("tol")) s.tol = get_number(item, "tol", ptr);
    if (opts.tol) s.tol = *opts.tol;
    if (!(s.tol > 0.0)) throw SchemaError(ptr + "/tol", "tol must be > 0");
    const std::int64_t repeat = get_int(item, "repeat", ptr, 1);
    if (repeat < 1) throw SchemaError(ptr + "/repeat", "repeat must be >= 1");
    s.repeat = static_cast<int>(repeat);
    s.params = item;
    out.push_back(std::move(s));
  }
  return out;
}

CheckReport run_check(const std::string& type, const json& params, std::uint64_t seed, double tol) {
  auto it = registry().find(type);
  if (it == registry().end()) throw SchemaError("/type", "unknown check type '" + type + "'");
  Rng rng(seed);
  try {
    return it->second(params, rng, seed, tol);
  } catch (const SchemaError&) {
    throw;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError("/", e.what());
  } catch (const std::exception& e) {
    CheckReport r(type);
    r.require("completed", false).note(std::string("error: ") + e.what());
    return r;
  }
}

ScenarioResult run_one(const Scenario& s) {
  const auto start = std::chrono::steady_clock::now();
  ScenarioResult out{s, CheckReport(s.type), 0.0};
  for (int rep = 0; rep < s.repeat; ++rep) {
    CheckReport r;
    try {
      r = run_check(s.type, s.params, derive_seed(s.seed, s.index, static_cast<std::uint64_t>(rep)), s.tol);
    } catch (const SchemaError& e) {
      throw SchemaError(prefixed(s.pointer, e.pointer()), std::string(e.what()).substr(e.pointer().size() + 2));
    }
    if (rep == 0) {
      out.report = std::move(r);
    } else {
      out.report.merge(r);
    }
  }
  out.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

std::vector<ScenarioResult> run_scenarios(const std::vector<Scenario>& scenarios, unsigned workers) {
  std::vector<std::optional<ScenarioResult>> slots(scenarios.size());
  std::vector<std::exception_ptr> errors(scenarios.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < scenarios.size(); i = next++) {
      try {
        slots[i] = run_one(scenarios[i]);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(1, scenarios.size()))));
  if (n == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  // The first error in input order wins, whatever the completion order was.
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  std::vector<ScenarioResult> out;
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

json report_document(const std::vector<ScenarioResult>& results) {
  json scenarios = json::array();
  std::size_t pass = 0, fail = 0, info = 0;
  for (const auto& r : results) {
    json entry = to_json(r.report);
    entry["index"] = r.scenario.index;
    entry["name"] = r.scenario.name;
    entry["type"] = r.scenario.type;
    entry["seed"] = r.scenario.seed;
    entry["tol"] = r.scenario.tol;
    entry["repeat"] = r.scenario.repeat;
    entry["params"] = r.scenario.params;
    entry["wall_time"] = r.wall_time;
    scenarios.push_back(std::move(entry));
    switch (r.report.verdict()) {
      case Verdict::Pass: ++pass; break;
      case Verdict::Fail: ++fail; break;
      case Verdict::Info: ++info; break;
    }
  }
  return {{"tool", "relloc"},
          {"version", kVersion},
          {"scenarios", scenarios},
          {"summary", {{"pass", pass}, {"fail", fail}, {"info", info}}}};
}

std::string csv_summary(const std::vector<ScenarioResult>& results) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "name,verdict,max_residual,tol,wall_time\n";
  for (const auto& r : results) {
    std::string name = r.scenario.name;
    if (name.find_first_of(",\"\n") != std::string::npos) {
      std::string q = "\"";
      for (char c : name) q += c == '"' ? std::string("\"\"") : std::string(1, c);
      name = q + "\"";
    }
    os << name << ',' << to_string(r.report.verdict()) << ',' << r.report.max_residual() << ','
       << r.scenario.tol << ',' << r.wall_time << '\n';
  }
  return os.str();
}

unsigned default_workers() {
  if (const char* env = std::getenv("RELLOC_WORKERS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
  }
  return 1;
}

int run_scenario_file(const std::string& path, const std::optional<std::string>& out_json,
                      const std::optional<std::string>& out_csv, const RunOptions& opts,
                      std::ostream& out, std::ostream& err) {
  std::vector<ScenarioResult> results;
  try {
    std::ifstream in(path);
    if (!in) {
      err << "error: cannot read " << path << '\n';
      return 2;
    }
    json doc;
    try {
      doc = json::parse(in);
    } catch (const json::parse_error& e) {
      err << "error: " << path << " is not valid JSON: " << e.what() << '\n';
      return 2;
    }
    results = run_scenarios(parse_scenarios(doc, opts), opts.workers);
  } catch (const SchemaError& e) {
    err << "schema error at " << e.what() << '\n';
    return 2;
  }

  bool failed = false;
  for (const auto& r : results) {
    const Verdict v = r.report.verdict();
    failed = failed || v == Verdict::Fail;
    out << std::left << std::setw(5) << to_string(v) << ' ' << r.scenario.name << "  max_residual="
        << std::setprecision(6) << r.report.max_residual() << '\n';
  }
  auto write = [&](const std::string& file, const std::string& text) {
    std::ofstream o(file);
    o << text;
    if (!o) {
      err << "error: cannot write " << file << '\n';
      return false;
    }
    return true;
  };
  if (out_json && !write(*out_json, report_document(results).dump(2) + "\n")) return 2;
  if (out_csv && !write(*out_csv, csv_summary(results))) return 2;
  return failed ? 1 : 0;
}

json generate_instance(const std::string& kind, Eigen::Index dim, std::uint64_t seed) {
  if (dim < 1) throw std::invalid_argument("gen: dimension must be >= 1");
  Rng rng(seed);
  if (kind == "state") return to_json(random_state(rng, dim));
  if (kind == "effect") return to_json(random_effect(rng, dim));
  if (kind == "povm") return to_json(random_povm(rng, dim, 3));
  if (kind == "luders_instrument") return to_json(luders_instrument(random_povm(rng, dim, 2)));
  if (kind == "commuting_pair") {
    const PovmPair pair = commuting_pair(rng, dim, 2 + rng.index(2), 2 + rng.index(2));
    return {{"type", "commuting_pair"}, {"first", to_json(pair.first)}, {"second", to_json(pair.second)}};
  }
  if (kind == "lattice_system") {
    if (dim < 2) throw std::invalid_argument("gen: lattice_system needs dim >= 2");
    return to_json(build_frame_smeared_system(static_cast<std::size_t>(dim), 1.0, 1.0, rng.uniform(1.0, 2.0)));
  }
  throw std::invalid_argument("gen: unknown kind '" + kind + "'");
}

}  // namespace relloc
