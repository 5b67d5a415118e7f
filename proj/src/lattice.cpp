#include "relloc/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace relloc {

CellSet::CellSet(std::size_t n, std::vector<std::size_t> cells) : n_(n), cells_(std::move(cells)) {
  for (std::size_t k : cells_) {
    if (k >= n_) {
      throw std::invalid_argument("CellSet: cell " + std::to_string(k) + " outside lattice of " +
                                  std::to_string(n_));
    }
  }
  std::sort(cells_.begin(), cells_.end());
  cells_.erase(std::unique(cells_.begin(), cells_.end()), cells_.end());
}

CellSet CellSet::all(std::size_t n) {
  std::vector<std::size_t> c(n);
  for (std::size_t k = 0; k < n; ++k) c[k] = k;
  return CellSet(n, std::move(c));
}

CellSet CellSet::none(std::size_t n) { return CellSet(n, {}); }

CellSet CellSet::interval(std::size_t n, std::size_t start, std::size_t len) {
  std::vector<std::size_t> c;
  for (std::size_t i = 0; i < std::min(len, n); ++i) c.push_back((start + i) % n);
  return CellSet(n, std::move(c));
}

bool CellSet::contains(std::size_t k) const {
  return std::binary_search(cells_.begin(), cells_.end(), k);
}

CellSet CellSet::complement() const {
  std::vector<std::size_t> c;
  for (std::size_t k = 0; k < n_; ++k) {
    if (!contains(k)) c.push_back(k);
  }
  return CellSet(n_, std::move(c));
}

CellSet CellSet::shifted(long s) const {
  const long n = static_cast<long>(n_);
  std::vector<std::size_t> c;
  for (std::size_t k : cells_) c.push_back(static_cast<std::size_t>(((static_cast<long>(k) + s) % n + n) % n));
  return CellSet(n_, std::move(c));
}

CellSet CellSet::expanded(std::size_t r) const {
  if (empty() || r == 0) return *this;
  if (2 * r + 1 >= n_) return all(n_);
  std::vector<std::size_t> c;
  for (std::size_t k : cells_) {
    for (std::size_t i = 0; i <= 2 * r; ++i) c.push_back((k + n_ - r + i) % n_);
  }
  return CellSet(n_, std::move(c));
}

void CellSet::require_same_lattice(const CellSet& other) const {
  if (n_ != other.n_) throw std::invalid_argument("CellSet: lattice size mismatch");
}

CellSet CellSet::united(const CellSet& other) const {
  require_same_lattice(other);
  std::vector<std::size_t> c = cells_;
  c.insert(c.end(), other.cells_.begin(), other.cells_.end());
  return CellSet(n_, std::move(c));
}

CellSet CellSet::intersected(const CellSet& other) const {
  require_same_lattice(other);
  std::vector<std::size_t> c;
  std::set_intersection(cells_.begin(), cells_.end(), other.cells_.begin(), other.cells_.end(),
                        std::back_inserter(c));
  return CellSet(n_, std::move(c));
}

CellSet CellSet::minus(const CellSet& other) const {
  require_same_lattice(other);
  std::vector<std::size_t> c;
  std::set_difference(cells_.begin(), cells_.end(), other.cells_.begin(), other.cells_.end(),
                      std::back_inserter(c));
  return CellSet(n_, std::move(c));
}

bool CellSet::disjoint(const CellSet& other) const { return intersected(other).empty(); }

bool CellSet::subset_of(const CellSet& other) const { return minus(other).empty(); }

std::string CellSet::to_string() const {
  std::ostringstream os;
  os << '{';
  for (std::size_t i = 0; i < cells_.size(); ++i) os << (i ? "," : "") << cells_[i];
  os << '}';
  return os.str();
}

std::string to_string(SystemKind k) {
  switch (k) {
    case SystemKind::Sharp: return "sharp";
    case SystemKind::FrameSmeared: return "frame_smeared";
    case SystemKind::DiagonalSmeared: return "diagonal_smeared";
  }
  return "unknown";
}

SystemKind parse_system_kind(const std::string& s) {
  if (s == "sharp") return SystemKind::Sharp;
  if (s == "frame_smeared") return SystemKind::FrameSmeared;
  if (s == "diagonal_smeared") return SystemKind::DiagonalSmeared;
  throw std::invalid_argument("unknown system kind '" + s + "'");
}

Matrix dft_matrix(std::size_t n) {
  Matrix f(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  const double norm = 1.0 / std::sqrt(static_cast<double>(n));
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) {
      // Reduce jk mod n first so the phase argument stays small.
      const double angle = -2.0 * std::numbers::pi * static_cast<double>((j * k) % n) /
                           static_cast<double>(n);
      f(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) = std::polar(norm, angle);
    }
  }
  return f;
}

Matrix cyclic_shift(std::size_t n) {
  const auto d = static_cast<Eigen::Index>(n);
  Matrix u = Matrix::Zero(d, d);
  for (Eigen::Index k = 0; k < d; ++k) u((k + 1) % d, k) = 1.0;
  return u;
}

RealVector lattice_dispersion(std::size_t n, double mass, double a) {
  RealVector omega(static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < n; ++j) {
    const double p = (2.0 / a) * std::sin(std::numbers::pi * static_cast<double>(j) /
                                          static_cast<double>(n));
    omega(static_cast<Eigen::Index>(j)) = std::sqrt(mass * mass + p * p);
  }
  return omega;
}

Matrix momentum_diagonal(const RealVector& omega) {
  const Matrix f = dft_matrix(static_cast<std::size_t>(omega.size()));
  return hermitian_part(f.adjoint() * omega.cast<Complex>().asDiagonal() * f);
}

namespace {

void check_params(std::size_t n, double mass, double a) {
  if (n < 2) throw std::invalid_argument("lattice system: n must be >= 2");
  if (!(mass > 0.0)) throw std::invalid_argument("lattice system: mass must be > 0");
  if (!(a > 0.0)) throw std::invalid_argument("lattice system: a must be > 0");
}

LatticeLocalizationSystem skeleton(std::size_t n, double mass, double a, SystemKind kind) {
  check_params(n, mass, a);
  LatticeLocalizationSystem sys;
  sys.n = n;
  sys.mass = mass;
  sys.a = a;
  sys.kind = kind;
  sys.shift = cyclic_shift(n);
  sys.hamiltonian = momentum_diagonal(lattice_dispersion(n, mass, a));
  return sys;
}

// Periodized Gaussian window w(j - k) on the cyclic lattice.
RealVector window(std::size_t n, std::size_t centre, double width) {
  const auto nn = static_cast<double>(n);
  const int images = static_cast<int>(std::ceil(10.0 * width / nn)) + 1;
  RealVector w(static_cast<Eigen::Index>(n));
  for (std::size_t j = 0; j < n; ++j) {
    const double d0 = static_cast<double>(j) - static_cast<double>(centre);
    double s = 0.0;
    for (int m = -images; m <= images; ++m) {
      const double d = d0 + m * nn;
      s += std::exp(-d * d / (2.0 * width * width));
    }
    w(static_cast<Eigen::Index>(j)) = s;
  }
  return w;
}

// Signed lattice momentum 2 pi j / n with j folded into (-n/2, n/2].
double signed_momentum(std::size_t j, std::size_t n) {
  const long jj = static_cast<long>(j) > static_cast<long>(n) / 2 ? static_cast<long>(j) - static_cast<long>(n)
                                                                 : static_cast<long>(j);
  return 2.0 * std::numbers::pi * static_cast<double>(jj) / static_cast<double>(n);
}

}  // namespace

LatticeLocalizationSystem build_sharp_system(std::size_t n, double mass, double a) {
  LatticeLocalizationSystem sys = skeleton(n, mass, a, SystemKind::Sharp);
  for (std::size_t k = 0; k < n; ++k) {
    Matrix e = Matrix::Zero(sys.dim(), sys.dim());
    e(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) = 1.0;
    sys.cell_effects.push_back(std::move(e));
  }
  return sys;
}

LatticeLocalizationSystem build_frame_smeared_system(std::size_t n, double mass, double a,
                                                     double width, double coherence) {
  if (!(width > 0.0)) throw std::invalid_argument("frame-smeared system: width must be > 0");
  if (!(coherence > 0.0)) throw std::invalid_argument("frame-smeared system: coherence must be > 0");
  LatticeLocalizationSystem sys = skeleton(n, mass, a, SystemKind::FrameSmeared);
  sys.width = width;
  sys.coherence = coherence;

  RealVector window_p(sys.dim());
  for (std::size_t j = 0; j < n; ++j) {
    const double p = signed_momentum(j, n);
    window_p(static_cast<Eigen::Index>(j)) = std::exp(-p * p * coherence * coherence / 2.0);
  }
  const Matrix c = momentum_diagonal(window_p);

  std::vector<Matrix> g;
  Matrix m = Matrix::Zero(sys.dim(), sys.dim());
  for (std::size_t k = 0; k < n; ++k) {
    const Vector gamma = window(n, k, width).cwiseSqrt().cast<Complex>();
    g.push_back(hermitian_part(gamma.asDiagonal() * c * gamma.asDiagonal()));
    m += g.back();
  }
  const Spectrum spec = hermitian_eig(m);
  const double floor = 1e3 * std::numeric_limits<double>::epsilon() * spec.values.maxCoeff();
  if (!(spec.values.minCoeff() > floor)) {
    throw std::domain_error("frame-smeared system: frame operator is numerically singular");
  }
  const Matrix w = psd_inv_sqrt(m, floor);
  for (const auto& gk : g) sys.cell_effects.push_back(hermitian_part(w * gk * w));
  return sys;
}

LatticeLocalizationSystem build_diagonal_smeared_system(std::size_t n, double mass, double a,
                                                        double width) {
  if (!(width > 0.0)) throw std::invalid_argument("diagonal-smeared system: width must be > 0");
  LatticeLocalizationSystem sys = skeleton(n, mass, a, SystemKind::DiagonalSmeared);
  sys.width = width;
  std::vector<RealVector> w;
  RealVector total = RealVector::Zero(sys.dim());
  for (std::size_t k = 0; k < n; ++k) {
    w.push_back(window(n, k, width));
    total += w.back();
  }
  for (const auto& wk : w) {
    const RealVector diag = wk.cwiseQuotient(total);
    sys.cell_effects.push_back(diag.cast<Complex>().asDiagonal());
  }
  return sys;
}

LatticeLocalizationSystem with_sign_alternating_spectrum(const LatticeLocalizationSystem& sys) {
  RealVector omega = lattice_dispersion(sys.n, sys.mass, sys.a);
  for (Eigen::Index j = 1; j < omega.size(); j += 2) omega(j) = -omega(j);
  return with_hamiltonian(sys, momentum_diagonal(omega));
}

LatticeLocalizationSystem with_hamiltonian(const LatticeLocalizationSystem& sys, Matrix h) {
  if (h.rows() != sys.dim() || h.cols() != sys.dim()) {
    throw std::invalid_argument("with_hamiltonian: dimension mismatch");
  }
  LatticeLocalizationSystem out = sys;
  out.hamiltonian = std::move(h);
  return out;
}

LatticeLocalizationSystem conjugated(const LatticeLocalizationSystem& sys, const Matrix& v) {
  LatticeLocalizationSystem out = sys;
  for (auto& e : out.cell_effects) e = hermitian_part(v * e * v.adjoint());
  out.shift = v * sys.shift * v.adjoint();
  out.hamiltonian = hermitian_part(v * sys.hamiltonian * v.adjoint());
  return out;
}

Effect effect_of(const LatticeLocalizationSystem& sys, const CellSet& delta) {
  if (delta.lattice_size() != sys.n) throw std::invalid_argument("effect_of: lattice size mismatch");
  Matrix a = Matrix::Zero(sys.dim(), sys.dim());
  for (std::size_t k : delta.cells()) a += sys.cell_effects[k];
  return Effect::unchecked(std::move(a));
}

CheckReport validate(const LatticeLocalizationSystem& sys, double tol) {
  CheckReport r("lattice_system");
  if (sys.cell_effects.size() != sys.n) {
    return r.require("effect_count", false).note("cell effect count differs from n");
  }
  Matrix sum = Matrix::Zero(sys.dim(), sys.dim());
  double bounds = 0.0;
  double covariance = 0.0;
  for (std::size_t k = 0; k < sys.n; ++k) {
    const Matrix& e = sys.cell_effects[k];
    sum += e;
    const RealVector ev = hermitian_eigenvalues(e);
    bounds = std::max({bounds, -ev.minCoeff(), ev.maxCoeff() - 1.0, hermiticity_residual(e)});
    covariance = std::max(covariance, op_norm(sys.shift * e * sys.shift.adjoint() -
                                              sys.cell_effects[(k + 1) % sys.n]));
  }
  const double normalization = op_norm(sum - identity(sys.dim()));
  if (normalization > tol) r.note("cell effects do not sum to the identity");
  if (bounds > tol) r.note("cell effect outside [0, I]");
  if (normalization <= tol && op_norm(sum) <= tol) r.note("zero-effect system");
  return r.at_most("normalization", normalization, tol)
      .at_most("effect_bounds", bounds, tol)
      .at_most("shift_unitarity", unitarity_residual(sys.shift), tol)
      .at_most("covariance", covariance, tol)
      .at_most("hamiltonian_hermiticity", hermiticity_residual(sys.hamiltonian),
               tol * std::max(1.0, op_norm(sys.hamiltonian)))
      .at_most("hamiltonian_shift_commutator", op_norm(commutator(sys.hamiltonian, sys.shift)),
               tol * std::max(1.0, op_norm(sys.hamiltonian)));
}

double covariance_residual(const LatticeLocalizationSystem& sys, const CellSet& delta) {
  const Matrix a = effect_of(sys, delta).matrix();
  const Matrix a1 = effect_of(sys, delta.shifted(1)).matrix();
  return op_norm(sys.shift * a * sys.shift.adjoint() - a1);
}

namespace {

Matrix evolved(const Matrix& u_t, const Matrix& a) { return u_t * a * u_t.adjoint(); }

}  // namespace

double microcausality_residual(const LatticeLocalizationSystem& sys, const CellSet& delta,
                               const CellSet& delta_prime, const std::vector<double>& times) {
  if (!delta.disjoint(delta_prime)) {
    throw std::invalid_argument("microcausality_residual: regions overlap");
  }
  const Matrix a = effect_of(sys, delta).matrix();
  const Matrix b = effect_of(sys, delta_prime).matrix();
  double worst = 0.0;
  for (double t : times) {
    const Matrix bt = t == 0.0 ? b : evolved(unitary_evolution(sys.hamiltonian, t), b);
    worst = std::max(worst, op_norm(commutator(a, bt)));
  }
  return worst;
}

HCAuditReport hc_audit(const LatticeLocalizationSystem& sys, const std::vector<CellSet>& samples,
                       const std::vector<double>& t_grid, double tol) {
  HCAuditReport out;
  const Matrix id = identity(sys.dim());

  out.additivity_residual = op_norm(effect_of(sys, CellSet::all(sys.n)).matrix() - id);
  for (std::size_t k = 0; k < sys.n; ++k) {
    out.covariance_residual =
        std::max(out.covariance_residual,
                 op_norm(sys.shift * sys.cell_effects[k] * sys.shift.adjoint() -
                         sys.cell_effects[(k + 1) % sys.n]));
  }
  std::vector<Matrix> sample_effects;
  for (const auto& s : samples) {
    const Matrix a = effect_of(sys, s).matrix();
    sample_effects.push_back(a);
    out.max_effect_norm = std::max(out.max_effect_norm, op_norm(a));
    const Matrix ac = effect_of(sys, s.complement()).matrix();
    out.additivity_residual = std::max(out.additivity_residual, op_norm(a + ac - id));
    if (s.size() >= 2) {
      const std::size_t half = s.size() / 2;
      const CellSet left(sys.n, {s.cells().begin(), s.cells().begin() + static_cast<long>(half)});
      const Matrix split =
          effect_of(sys, left).matrix() + effect_of(sys, s.minus(left)).matrix();
      out.additivity_residual = std::max(out.additivity_residual, op_norm(a - split));
    }
    out.covariance_residual = std::max(out.covariance_residual, covariance_residual(sys, s));
  }
  out.energy_min_eig = min_eigenvalue(sys.hamiltonian);

  std::vector<double> times = t_grid;
  std::sort(times.begin(), times.end(), [](double x, double y) { return std::abs(x) < std::abs(y); });
  std::size_t pairs = 0;
  for (double t : times) {
    const Matrix u_t = unitary_evolution(sys.hamiltonian, t);
    for (std::size_t i = 0; i < samples.size(); ++i) {
      for (std::size_t j = 0; j < samples.size(); ++j) {
        if (i == j || !samples[i].disjoint(samples[j])) continue;
        if (!(lattice_distance(sys, samples[i], samples[j]) > 0.0)) continue;
        if (t == times.front()) ++pairs;
        const Matrix bt = t == 0.0 ? sample_effects[j] : evolved(u_t, sample_effects[j]);
        const double res = op_norm(commutator(sample_effects[i], bt));
        if (res > tol && !out.first_violation_t) out.first_violation_t = t;
        if (res > out.microcausality_residual) {
          out.microcausality_residual = res;
          out.microcausality_witness = HCWitness{samples[i], samples[j], t, res};
        }
      }
    }
  }

  if (out.additivity_residual > tol) out.failing.push_back(1);
  if (out.covariance_residual > tol) out.failing.push_back(2);
  if (out.energy_min_eig < -tol) out.failing.push_back(3);
  if (out.microcausality_residual > tol) out.failing.push_back(4);

  bool consistent = true;
  if (!(out.max_effect_norm > tol)) {
    out.consistency_verdict = "effects vanish; consistent with HC";
  } else if (!out.failing.empty()) {
    std::string v;
    for (int h : out.failing) v += "hypothesis " + std::to_string(h) + " fails; ";
    out.consistency_verdict = v + "consistent with HC";
  } else {
    consistent = false;
    out.consistency_verdict = "all hypotheses hold with nonzero effects; inconsistent with HC";
  }

  auto& r = out.report;
  r = CheckReport("hc_audit");
  r.info("additivity_residual", out.additivity_residual)
      .info("covariance_residual", out.covariance_residual)
      .info("energy_min_eig", out.energy_min_eig)
      .info("microcausality_residual", out.microcausality_residual)
      .info("max_effect_norm", out.max_effect_norm)
      .info("separated_pairs", static_cast<double>(pairs))
      .require("consistent_with_hc", consistent)
      .note(out.consistency_verdict);
  if (pairs == 0) r.note("no sample pair at positive distance; hypothesis 4 not probed");
  if (out.first_violation_t) r.info("first_violation_t", *out.first_violation_t);
  return out;
}

CellSet causal_shadow(const LatticeLocalizationSystem& sys, const CellSet& delta, double t) {
  // The small offset keeps t = m a from rounding up to m + 1 cells.
  const double cells = std::ceil(std::abs(t) / sys.a - 1e-12);
  return delta.expanded(static_cast<std::size_t>(std::max(0.0, cells)));
}

CCResult cc_residual(const LatticeLocalizationSystem& sys, const CellSet& delta, double t) {
  CCResult out;
  out.shadow = causal_shadow(sys, delta, t);
  const Matrix a = effect_of(sys, delta).matrix();
  if (out.shadow.full()) {
    out.saturated = true;
    if (delta.full()) return out;
    out.residual = min_eigenvalue(identity(sys.dim()) - a);
    return out;
  }
  if (t == 0.0) {
    out.residual = 0.0;
    return out;
  }
  const Matrix shadow = effect_of(sys, out.shadow).matrix();
  out.residual = min_eigenvalue(evolved(unitary_evolution(sys.hamiltonian, t), shadow) - a);
  return out;
}

SpacetimeBox cell_box(const LatticeLocalizationSystem& sys, std::size_t k, double time) {
  const double x0 = static_cast<double>(k) * sys.a;
  return SpacetimeBox::spatial(time, {x0, 0.0, 0.0}, {x0 + sys.a, sys.a, sys.a});
}

RegionUnion cells_region(const LatticeLocalizationSystem& sys, const CellSet& delta, double time) {
  if (delta.empty()) throw std::invalid_argument("cells_region: empty cell set");
  std::vector<SpacetimeBox> boxes;
  const auto& c = delta.cells();
  std::size_t start = c.front();
  for (std::size_t i = 1; i <= c.size(); ++i) {
    if (i < c.size() && c[i] == c[i - 1] + 1) continue;
    const double lo = static_cast<double>(start) * sys.a;
    const double hi = static_cast<double>(c[i - 1] + 1) * sys.a;
    boxes.push_back(SpacetimeBox::spatial(time, {lo, 0.0, 0.0}, {hi, sys.a, sys.a}));
    if (i < c.size()) start = c[i];
  }
  return RegionUnion(std::move(boxes));
}

double lattice_distance(const LatticeLocalizationSystem& sys, const CellSet& delta,
                        const CellSet& delta_prime) {
  double best = std::numeric_limits<double>::infinity();
  const long n = static_cast<long>(sys.n);
  for (std::size_t k : delta.cells()) {
    for (std::size_t kp : delta_prime.cells()) {
      for (long m = -1; m <= 1; ++m) {
        const long sep = std::abs(static_cast<long>(k) - static_cast<long>(kp) - m * n);
        best = std::min(best, static_cast<double>(std::max(0L, sep - 1)) * sys.a);
      }
    }
  }
  return best;
}

RegionUnion ldp_minimal_region(const LatticeLocalizationSystem& sys, const CellSet& delta,
                               const SpacetimeBox& sigma_box) {
  if (!sigma_box.is_spatial()) throw std::invalid_argument("ldp_minimal_region: rest space box");
  // Detection in Delta forces the region to contain Delta; detection of the
  // complementary outcome forces it to contain the complement.
  const CellSet forced = delta.united(delta.complement());
  const double x0 = sigma_box.lo().x;
  const double slab = (sigma_box.hi().x - x0) / static_cast<double>(sys.n);
  std::vector<SpacetimeBox> boxes;
  const auto& c = forced.cells();
  std::size_t start = c.front();
  for (std::size_t i = 1; i <= c.size(); ++i) {
    if (i < c.size() && c[i] == c[i - 1] + 1) continue;
    FourVector lo = sigma_box.lo();
    FourVector hi = sigma_box.hi();
    lo.x = start == 0 ? sigma_box.lo().x : x0 + static_cast<double>(start) * slab;
    hi.x = c[i - 1] + 1 == sys.n ? sigma_box.hi().x : x0 + static_cast<double>(c[i - 1] + 1) * slab;
    boxes.emplace_back(lo, hi);
    if (i < c.size()) start = c[i];
  }
  return RegionUnion(std::move(boxes));
}

CheckReport projector_identity(const Effect& p, const Effect& q, const Effect& r, double tol) {
  CheckReport rep("projector_identity");
  const Matrix& pm = p.matrix();
  const Matrix& qm = q.matrix();
  const Matrix& rm = r.matrix();
  if (pm.rows() != qm.rows() || pm.rows() != rm.rows()) {
    return rep.require("dimensions", false).note("precondition violated: dimension mismatch");
  }
  auto projector = [](const Matrix& m) {
    return std::max(op_norm(m * m - m), hermiticity_residual(m));
  };
  const double pre_p = projector(pm);
  const double pre_q = projector(qm);
  const double pre_r = projector(rm);
  const double pre_order = op_norm(qm * pm - pm);
  const double pre_orth = op_norm(qm * rm);
  rep.at_most("P_projector", pre_p, tol)
      .at_most("Q_projector", pre_q, tol)
      .at_most("R_projector", pre_r, tol)
      .at_most("QP_minus_P", pre_order, tol)
      .at_most("QR", pre_orth, tol);
  bool ok = true;
  auto flag = [&](double v, const char* text) {
    if (v > tol) {
      rep.note(std::string("precondition violated: ") + text);
      ok = false;
    }
  };
  flag(pre_p, "P is not a projector");
  flag(pre_q, "Q is not a projector");
  flag(pre_r, "R is not a projector");
  flag(pre_order, "P <= Q fails (QP != P)");
  flag(pre_orth, "QR != 0");
  if (!ok) return rep.note("conclusion skipped");

  const double bound = static_cast<double>(pm.rows()) * tol;
  const Matrix pr = pm * rm;
  const Matrix qpr = qm * pm * rm;
  const Matrix pqr = pm * qm * rm;
  const Matrix comm = commutator(pm, rm);
  return rep.at_most("PR", op_norm(pr), bound)
      .at_most("PR_minus_QPR", op_norm(pr - qpr), bound)
      .at_most("QPR_minus_PQR", op_norm(qpr - pqr), bound)
      .at_most("PQR", op_norm(pqr), bound)
      .at_most("commutator", op_norm(comm), 2.0 * bound)
      .at_most("commutator_vs_adjoint_form", op_norm(comm - (pr - pr.adjoint())), bound);
}

}  // namespace relloc
