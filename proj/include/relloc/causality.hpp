#pragma once

// No-signaling and relativistic-consistency functionals. Each "for every
// state" quantifier is discharged as an operator norm: sup over states of
// |tr(rho X)| for Hermitian X is ||X||_op.

#include <cstdint>
#include <optional>

#include "relloc/measurement.hpp"
#include "relloc/random.hpp"

namespace relloc {

/// Literal product form of the sequential-statistics condition, recorded on
/// every RCC report.
inline constexpr const char* kRccProductFormNote =
    "literal product form tr(rho^T_j S_i) tr(rho^T_j) has second factor 1 for normalized "
    "selective states; the sequential joint probability (unnormalized sub-state) is used";

struct DeviationReport {
  double nsc_dev = 0.0;
  /// NSC deviation of S^2 (Beck's second condition).
  double nsc_sq_dev = 0.0;
  double rcc_dev = 0.0;
  /// max ||[T_j, S_i]|| between effects.
  double commutator_residual = 0.0;
  /// max ||[K_jk, S]||, ||[K_jk^dagger, S]||.
  double kraus_commutator_residual = 0.0;
  CheckReport report;
};

/// ||sum_jk K_jk^dagger S K_jk - S||_op.
double nsc_deviation(const KrausInstrument& instr, const Matrix& s);
double nsc_deviation(const KrausInstrument& instr, const Effect& s);

/// max_{j,i} ||K^T_j^dagger S_i K^T_j - K^S_i^dagger T_j K^S_i||_op.
/// Throws std::invalid_argument unless both instruments are efficient.
double rcc_deviation(const KrausInstrument& first, const KrausInstrument& second);

/// max_{j,i} ||[T_j, S_i]||_op. Throws std::invalid_argument on dim mismatch.
double commutator_residual(const DiscretePOVM& t, const DiscretePOVM& s);

/// max_j ||[T_j, S]||_op.
double effect_commutator_residual(const DiscretePOVM& t, const Matrix& s);

/// max_jk max(||[K_jk, S]||, ||[K_jk^dagger, S]||).
double kraus_commutator_residual(const KrausInstrument& instr, const Matrix& s);

/// Lueders instruments of T and S against each other: NSC of Lueders(T)
/// against every S_i, RCC of the pair, and effect commutators. Asserts that
/// commutator <= tol iff every deviation is <= tol * max_i ||S_i||.
DeviationReport luders_equivalence_check(const DiscretePOVM& t, const DiscretePOVM& s,
                                         double tol = kDefaultTol);

/// d1 = NSC(S), d2 = NSC(S^2), kappa = Kraus commutator. Asserts
/// kappa <= tol iff (d1, d2 <= tol * ||S||), and kappa <= tol implies the
/// induced effects commute with S.
DeviationReport beck_check(const KrausInstrument& instr, const Effect& s, double tol = kDefaultTol);

/// Instrument with an effect that is invariant under the dual map while its
/// square is not: K0 = |0><0| + |1><1|, K1 = |0><2|/sqrt2, K2 = |1><2|/sqrt2 on
/// C^3 and S = diag(1, 0, 1/2). d1 = 0, d2 = 1/4.
InstrumentEffect heinosaari_wolf_example();

struct HWSearchOptions {
  std::size_t restarts = 8;
  unsigned threads = 1;
  double d1_target = 1e-9;
  double d2_target = 1e-3;
  /// Coordinate-perturbation evaluations spent on one candidate instrument.
  std::size_t refine_steps = 40;
};

struct HWWitness {
  KrausInstrument instrument;
  Effect effect;
  double d1 = 0.0;
  double d2 = 0.0;
  std::size_t evaluations = 0;
  std::size_t restart = 0;
};

/// Both values recomputed directly; true iff d1 <= d1_target and d2 >= d2_target.
bool accept_witness(const KrausInstrument& instr, const Effect& s,
                    const HWSearchOptions& opts = {});

/// Randomized search for an instrument and effect with NSC(S) <= d1_target
/// and NSC(S^2) >= d2_target. `budget` bounds the number of (instrument,
/// effect) evaluations over all restarts. Returns std::nullopt (NOT_FOUND)
/// when nothing is accepted. The result does not depend on opts.threads.
std::optional<HWWitness> heinosaari_wolf_search(Eigen::Index dim, std::uint64_t seed,
                                                std::size_t budget,
                                                const HWSearchOptions& opts = {});

}  // namespace relloc
