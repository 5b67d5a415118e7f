#pragma once

// Laboratory-conditioned POVMs B(Delta) = V A(Delta0)^{-1/2} A(Delta)
// A(Delta0)^{-1/2} V^dagger for Delta inside the lab Delta0, together with the
// gentle measurement bound and the checks built on it.

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "relloc/lattice.hpp"

namespace relloc {

/// Construction requires min eig A(Delta0) > kKernelFloorFactor * ||A(Delta0)||.
inline constexpr double kKernelFloorFactor = 1e-8;

/// Smallest eigenvalue of the lab effect; the kernel is numerically trivial
/// when it exceeds the floor above.
double kernel_min_eig(const Matrix& a0);
double kernel_min_eig(const Effect& a0);

class ConditionalPOVM {
 public:
  ConditionalPOVM() = default;

  const CellSet& lab() const { return lab_; }
  const Matrix& inv_sqrt() const { return inv_sqrt_; }
  const Matrix& sqrt_lab() const { return sqrt_lab_; }
  const Matrix& conjugator() const { return v_; }
  /// ||T(Delta0)||_op; 1 or less for a normalized system.
  double lab_norm() const { return lab_norm_; }
  double kernel_min_eig() const { return kernel_min_eig_; }
  Eigen::Index dim() const { return inv_sqrt_.rows(); }

  /// T(Delta) = sum of the cell operators in Delta. Throws
  /// std::invalid_argument unless Delta is inside the lab.
  Matrix lab_operator(const CellSet& delta) const;
  /// B(Delta). Throws std::invalid_argument unless Delta is inside the lab.
  Effect effect(const CellSet& delta) const;

 private:
  friend ConditionalPOVM make_conditional(const CellSet&, std::map<std::size_t, Matrix>,
                                          const std::optional<Matrix>&);

  CellSet lab_;
  std::map<std::size_t, Matrix> cell_ops_;
  Matrix inv_sqrt_;
  Matrix sqrt_lab_;
  Matrix v_;
  double lab_norm_ = 0.0;
  double kernel_min_eig_ = 0.0;
};

/// Conditional POVM of `sys` on the lab `delta0`. Throws std::domain_error
/// when the kernel of A(Delta0) is numerically nontrivial and
/// std::invalid_argument when V is not unitary within kDefaultTol.
ConditionalPOVM build_conditional(const LatticeLocalizationSystem& sys, const CellSet& delta0,
                                  const std::optional<Matrix>& v = std::nullopt);

/// Same construction from a positive-operator family that need not sum to
/// the identity. Every cell of delta0 needs a singleton entry; entries for
/// larger sets are checked against the sum of their cells (std::invalid_argument
/// on mismatch beyond kDefaultTol).
ConditionalPOVM build_conditional_from_unnormalized(
    const std::vector<std::pair<CellSet, Matrix>>& family, const CellSet& delta0);

struct GentleBoundReport {
  double delta = 0.0;
  double lhs_trace_dist = 0.0;
  double rhs_bound = 0.0;
  double margin = 0.0;
  CheckReport report;
};

/// delta = 1 - tr(rho T)/||T||, lhs = ||rho - sqrt(T) rho sqrt(T)/tr(T rho)||_1,
/// rhs = 2 sqrt(delta) + delta. Asserts margin >= -1e-9. Throws
/// std::domain_error when tr(rho T) <= kProbFloor.
GentleBoundReport gentle_bound(const Effect& t, const DensityState& rho);

/// Compares tr(rho B(Delta)) with the detection fraction
/// tr(rho A(Delta))/tr(rho A(Delta0)) against 2 sqrt(delta) + delta, in both
/// the scalar and the ||B||-weighted form.
CheckReport conditional_prob_bound(const LatticeLocalizationSystem& sys, const CellSet& delta,
                                   const CellSet& delta0, const DensityState& rho);

/// B built with conjugator V against B' built from the conjugated system, on
/// the singletons of the lab, its prefixes and the lab itself; also compares
/// the two energy spectra.
CheckReport v_conjugation_reduction(const LatticeLocalizationSystem& sys, const CellSet& delta0,
                                    const Matrix& v);

/// Two-lab composition identity over subsets of the joint lab (all subsets
/// up to 10 cells, an evenly strided selection beyond), plus the size of the
/// plain additivity failure across the labs.
CheckReport composition_identity_check(const LatticeLocalizationSystem& sys, const CellSet& delta0,
                                       const CellSet& delta0_prime);

struct CrossLabCommutator {
  double value = 0.0;
  double distance = 0.0;
  bool separated = false;
  CheckReport report;
};

/// ||[B_{Delta0}(Delta), B_{Delta0'}(Delta')]||_op with the labs' distance and
/// causal separation (periodic images included). Measurement only.
CrossLabCommutator cross_lab_commutator(const LatticeLocalizationSystem& sys_a,
                                        const CellSet& delta0, const CellSet& delta,
                                        const LatticeLocalizationSystem& sys_b,
                                        const CellSet& delta0_prime, const CellSet& delta_prime);

}  // namespace relloc
