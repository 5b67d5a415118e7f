#pragma once

// Localization observables on a cyclic lattice of n cells: cell effects E_k
// summing to the identity, the one-cell shift U and a shift-invariant
// Hamiltonian H = F^dagger diag(omega) F.

#include <optional>
#include <string>
#include <vector>

#include "relloc/geometry.hpp"
#include "relloc/measurement.hpp"

namespace relloc {

/// Subset of the cells {0, ..., n-1}, kept sorted and duplicate-free.
class CellSet {
 public:
  CellSet() = default;
  /// Throws std::invalid_argument for cells >= n.
  CellSet(std::size_t n, std::vector<std::size_t> cells);

  static CellSet all(std::size_t n);
  static CellSet none(std::size_t n);
  /// Cells start, start+1, ..., start+len-1 modulo n.
  static CellSet interval(std::size_t n, std::size_t start, std::size_t len);

  std::size_t lattice_size() const { return n_; }
  const std::vector<std::size_t>& cells() const { return cells_; }
  std::size_t size() const { return cells_.size(); }
  bool empty() const { return cells_.empty(); }
  bool full() const { return cells_.size() == n_; }
  bool contains(std::size_t k) const;

  CellSet complement() const;
  /// Every cell moved by s (modulo n).
  CellSet shifted(long s) const;
  /// Cells within cyclic distance r of the set.
  CellSet expanded(std::size_t r) const;
  CellSet united(const CellSet& other) const;
  CellSet intersected(const CellSet& other) const;
  CellSet minus(const CellSet& other) const;
  bool disjoint(const CellSet& other) const;
  bool subset_of(const CellSet& other) const;

  std::string to_string() const;
  friend bool operator==(const CellSet&, const CellSet&) = default;

 private:
  void require_same_lattice(const CellSet& other) const;

  std::size_t n_ = 0;
  std::vector<std::size_t> cells_;
};

enum class SystemKind {
  Sharp,            // E_k = |k><k|
  FrameSmeared,     // phase-space frame, noncommuting effects
  DiagonalSmeared,  // position-diagonal smearing, commuting effects
};

std::string to_string(SystemKind k);
/// Accepts "sharp", "frame_smeared", "diagonal_smeared"; throws otherwise.
SystemKind parse_system_kind(const std::string& s);

struct LatticeLocalizationSystem {
  std::size_t n = 0;
  double a = 1.0;
  double mass = 1.0;
  /// Position spread of the smearing window in cells (0 for sharp).
  double width = 0.0;
  /// Momentum window of the frame in cells (frame-smeared only).
  double coherence = 0.0;
  SystemKind kind = SystemKind::Sharp;
  std::vector<Matrix> cell_effects;
  Matrix shift;
  Matrix hamiltonian;

  Eigen::Index dim() const { return static_cast<Eigen::Index>(n); }
};

/// Unitary DFT, F_jk = exp(-2 pi i j k / n) / sqrt(n).
Matrix dft_matrix(std::size_t n);
/// U |k> = |k+1 mod n>.
Matrix cyclic_shift(std::size_t n);
/// omega_j = sqrt(mass^2 + ((2/a) sin(pi j / n))^2).
RealVector lattice_dispersion(std::size_t n, double mass, double a);
/// F^dagger diag(omega) F.
Matrix momentum_diagonal(const RealVector& omega);

/// Throws std::invalid_argument unless n >= 2, mass > 0, a > 0.
LatticeLocalizationSystem build_sharp_system(std::size_t n, double mass, double a);

/// E_k = M^{-1/2} G_k M^{-1/2} with G_k = Gamma_k C Gamma_k, Gamma_k the square
/// root of a periodized Gaussian window of std `width` cells centred on k,
/// and C = F^dagger diag(exp(-p^2 coherence^2 / 2)) F. Throws
/// std::invalid_argument for width <= 0 or coherence <= 0 and
/// std::domain_error when M is numerically singular.
LatticeLocalizationSystem build_frame_smeared_system(std::size_t n, double mass, double a,
                                                     double width, double coherence = 1.0);

/// Same window with C = I: E_k = diag(w(j - k)) / sum, commuting effects.
LatticeLocalizationSystem build_diagonal_smeared_system(std::size_t n, double mass, double a,
                                                        double width);

/// Copy with H = F^dagger diag((-1)^j omega_j) F, which has negative
/// eigenvalues.
LatticeLocalizationSystem with_sign_alternating_spectrum(const LatticeLocalizationSystem& sys);

LatticeLocalizationSystem with_hamiltonian(const LatticeLocalizationSystem& sys, Matrix h);

/// Copy with effects V E_k V^dagger, shift V U V^dagger and Hamiltonian
/// V H V^dagger.
LatticeLocalizationSystem conjugated(const LatticeLocalizationSystem& sys, const Matrix& v);

/// A(Delta) = sum_{k in Delta} E_k.
Effect effect_of(const LatticeLocalizationSystem& sys, const CellSet& delta);

/// Normalization, effect bounds, unitarity of U, covariance U E_k U^dagger =
/// E_{k+1}, Hermiticity of H and [H, U] = 0.
CheckReport validate(const LatticeLocalizationSystem& sys, double tol = kDefaultTol);

/// ||U A(Delta) U^dagger - A(Delta + 1)||_op.
double covariance_residual(const LatticeLocalizationSystem& sys, const CellSet& delta);

/// max over t of ||[A(Delta), e^{-itH} A(Delta') e^{itH}]||_op. Throws
/// std::invalid_argument if the sets overlap.
double microcausality_residual(const LatticeLocalizationSystem& sys, const CellSet& delta,
                               const CellSet& delta_prime, const std::vector<double>& times);

struct HCWitness {
  CellSet delta;
  CellSet delta_prime;
  double t = 0.0;
  double residual = 0.0;
};

struct HCAuditReport {
  double additivity_residual = 0.0;
  double covariance_residual = 0.0;
  double energy_min_eig = 0.0;
  double microcausality_residual = 0.0;
  double max_effect_norm = 0.0;
  /// Hypotheses (1-4) whose residual exceeds tolerance.
  std::vector<int> failing;
  /// Smallest swept t whose microcausality residual exceeds tolerance.
  std::optional<double> first_violation_t;
  std::optional<HCWitness> microcausality_witness;
  std::string consistency_verdict;
  CheckReport report;
};

/// Residuals of the four hypotheses and the largest sampled effect norm.
/// Hypothesis 3 is audited as min eig(H) >= -tol; hypothesis 4 over all
/// disjoint sample pairs and the given times. The asserted condition is that
/// nonzero effects come with at least one failing hypothesis.
HCAuditReport hc_audit(const LatticeLocalizationSystem& sys, const std::vector<CellSet>& samples,
                       const std::vector<double>& t_grid, double tol = kDefaultTol);

/// Delta expanded by ceil(|t|/a) cells on each side.
CellSet causal_shadow(const LatticeLocalizationSystem& sys, const CellSet& delta, double t);

struct CCResult {
  double residual = 0.0;
  bool saturated = false;
  CellSet shadow;
};

/// min eig(e^{-itH} A(Delta_t) e^{itH} - A(Delta)) with Delta_t the causal
/// shadow. When the shadow is the full lattice the result is
/// min eig(I - A(Delta)), flagged saturated.
CCResult cc_residual(const LatticeLocalizationSystem& sys, const CellSet& delta, double t);

/// Spatial box of cell k: [k a, (k+1) a] x [0, a]^2 on the plane t = time.
SpacetimeBox cell_box(const LatticeLocalizationSystem& sys, std::size_t k, double time = 0.0);
/// Cells merged into maximal runs along x (no wrap-around).
RegionUnion cells_region(const LatticeLocalizationSystem& sys, const CellSet& delta,
                         double time = 0.0);
/// Smallest distance between cell boxes of the two sets, periodic images at
/// +-n a included.
double lattice_distance(const LatticeLocalizationSystem& sys, const CellSet& delta,
                        const CellSet& delta_prime);

/// Minimal region a localization claim for {A(Delta), I - A(Delta)} has to
/// contain: the detection regions of Delta and of its complement, mapped onto
/// x-slabs of sigma_box and merged. Always the whole of sigma_box.
RegionUnion ldp_minimal_region(const LatticeLocalizationSystem& sys, const CellSet& delta,
                               const SpacetimeBox& sigma_box);

/// Projector algebra for P <= Q, QR = 0: PR = QPR = PQR = 0 and
/// [P, R] = PR - (PR)^dagger. Precondition failures are reported and the
/// conclusion is skipped.
CheckReport projector_identity(const Effect& p, const Effect& q, const Effect& r,
                                double tol = kDefaultTol);

}  // namespace relloc
