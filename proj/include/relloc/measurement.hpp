#pragma once

// Effects, finite discrete POVMs, Kraus instruments and post-measurement
// states on a finite-dimensional Hilbert space.

#include <optional>
#include <string>
#include <vector>

#include "relloc/linalg.hpp"
#include "relloc/report.hpp"

namespace relloc {

struct ValidationOptions {
  double tol = kDefaultTol;
  /// Require every effect to be nonzero (the default reading of 0 < T_j).
  bool require_nonzero = true;
  /// Require every effect to be strictly positive definite.
  bool strict_positive = false;
};

/// Hermitian operator with 0 <= E <= I.
class Effect {
 public:
  Effect() = default;

  /// Throws std::invalid_argument if the matrix is not an effect within
  /// `tol` (scaled by max(1, ||m||)).
  explicit Effect(Matrix m, double tol = kDefaultTol);

  /// Skips validation; for values produced by construction (e.g. sums of
  /// projector blocks) that are validated elsewhere.
  static Effect unchecked(Matrix m);

  const Matrix& matrix() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }

 private:
  Matrix m_;
};

/// Hermitian PSD operator of unit trace.
class DensityState {
 public:
  DensityState() = default;
  explicit DensityState(Matrix m, double tol = kDefaultTol);
  static DensityState unchecked(Matrix m);
  /// |psi><psi| / <psi|psi>.
  static DensityState pure(const Vector& psi);

  const Matrix& matrix() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }

 private:
  Matrix m_;
};

/// Finite family of effects summing to the identity.
class DiscretePOVM {
 public:
  DiscretePOVM() = default;
  /// Throws std::invalid_argument when normalization, positivity or the
  /// nonzero requirement fails.
  explicit DiscretePOVM(std::vector<Matrix> effects, std::vector<std::string> labels = {},
                        const ValidationOptions& opts = {});
  static DiscretePOVM unchecked(std::vector<Effect> effects, std::vector<std::string> labels = {});

  /// Two-outcome POVM {E, I - E}.
  static DiscretePOVM elementary(const Effect& e);

  std::size_t size() const { return effects_.size(); }
  const Effect& operator[](std::size_t j) const { return effects_.at(j); }
  const std::vector<Effect>& effects() const { return effects_; }
  const std::vector<std::string>& labels() const { return labels_; }
  Eigen::Index dim() const { return effects_.empty() ? 0 : effects_.front().dim(); }

 private:
  std::vector<Effect> effects_;
  std::vector<std::string> labels_;
};

/// For each outcome j a finite list of Kraus operators K_jk with
/// sum_k K_jk^dagger K_jk = T_j.
class KrausInstrument {
 public:
  KrausInstrument() = default;
  /// Builds the induced POVM and validates it. Throws std::invalid_argument
  /// when the induced effects do not sum to the identity.
  explicit KrausInstrument(std::vector<std::vector<Matrix>> families,
                           std::vector<std::string> labels = {},
                           const ValidationOptions& opts = {});

  const std::vector<std::vector<Matrix>>& families() const { return families_; }
  const std::vector<Matrix>& family(std::size_t j) const { return families_.at(j); }
  const DiscretePOVM& povm() const { return povm_; }
  std::size_t outcomes() const { return families_.size(); }
  Eigen::Index dim() const { return povm_.dim(); }
  bool efficient() const;

 private:
  std::vector<std::vector<Matrix>> families_;
  DiscretePOVM povm_;
};

CheckReport validate(const Effect& e, double tol = kDefaultTol);
CheckReport validate(const DensityState& rho, double tol = kDefaultTol);
CheckReport validate(const DiscretePOVM& povm, const ValidationOptions& opts = {});
CheckReport validate(const KrausInstrument& instr, const ValidationOptions& opts = {});

/// Raw-matrix variants, used to validate untrusted input before wrapping it.
CheckReport validate_effect_matrix(const Matrix& m, double tol = kDefaultTol);
CheckReport validate_state_matrix(const Matrix& m, double tol = kDefaultTol);

/// Efficient instrument with K_j = sqrt(T_j).
KrausInstrument luders_instrument(const DiscretePOVM& povm);

/// K = V sqrt(T). Throws std::invalid_argument if V is not isometric on the
/// range of sqrt(T) within tol.
Matrix polar_kraus(const Effect& t, const Matrix& v, double tol = kDefaultTol);

struct SelectiveOutcome {
  double probability = 0.0;
  DensityState state;
};

/// Conditional state for outcome j. Throws std::domain_error if the outcome
/// probability is at or below `prob_floor`.
SelectiveOutcome selective_post_state(const DensityState& rho, const KrausInstrument& instr,
                                      std::size_t outcome, double prob_floor = kProbFloor);

/// sum_jk K_jk rho K_jk^dagger.
DensityState nonselective_post_state(const DensityState& rho, const KrausInstrument& instr);

/// sum_k tr(S K_jk rho K_jk^dagger): probability of outcome j followed by a
/// click of `second`, using unnormalized sub-states.
double sequential_joint_prob(const DensityState& rho, const KrausInstrument& first,
                             std::size_t outcome, const Effect& second);

/// Heisenberg-picture dual of the non-selective map: sum_jk K_jk^dagger X K_jk.
Matrix dual_map(const KrausInstrument& instr, const Matrix& x);

/// Heisenberg-picture dual restricted to a single outcome.
Matrix dual_map(const KrausInstrument& instr, std::size_t outcome, const Matrix& x);

}  // namespace relloc
