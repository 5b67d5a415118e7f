#include "relloc/conditional.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace relloc {

double kernel_min_eig(const Matrix& a0) { return min_eigenvalue(a0); }

double kernel_min_eig(const Effect& a0) { return min_eigenvalue(a0.matrix()); }

ConditionalPOVM make_conditional(const CellSet& lab, std::map<std::size_t, Matrix> cell_ops,
                                 const std::optional<Matrix>& v) {
  if (lab.empty()) throw std::invalid_argument("conditional POVM: empty lab");
  ConditionalPOVM out;
  out.lab_ = lab;
  out.cell_ops_ = std::move(cell_ops);
  const Matrix a0 = out.lab_operator(lab);
  out.lab_norm_ = op_norm(a0);
  out.kernel_min_eig_ = kernel_min_eig(a0);
  const double floor = kKernelFloorFactor * out.lab_norm_;
  if (!(out.kernel_min_eig_ > floor)) {
    throw std::domain_error(
        "conditional POVM: lab effect has a numerically nontrivial kernel (min eigenvalue " +
        std::to_string(out.kernel_min_eig_) +
        "); its range is not dense, so the inverse square root does not exist");
  }
  out.inv_sqrt_ = psd_inv_sqrt(a0, floor);
  out.sqrt_lab_ = psd_sqrt(a0);
  if (v) {
    if (v->rows() != a0.rows() || v->cols() != a0.cols() || unitarity_residual(*v) > kDefaultTol) {
      throw std::invalid_argument("conditional POVM: conjugator is not unitary");
    }
    out.v_ = *v;
  } else {
    out.v_ = identity(a0.rows());
  }
  return out;
}

Matrix ConditionalPOVM::lab_operator(const CellSet& delta) const {
  if (!delta.subset_of(lab_)) {
    throw std::invalid_argument("conditional POVM: " + delta.to_string() + " is not inside the lab " +
                                lab_.to_string());
  }
  const Eigen::Index d = cell_ops_.begin()->second.rows();
  Matrix t = Matrix::Zero(d, d);
  for (std::size_t k : delta.cells()) t += cell_ops_.at(k);
  return t;
}

Effect ConditionalPOVM::effect(const CellSet& delta) const {
  const Matrix t = lab_operator(delta);
  return Effect::unchecked(hermitian_part(v_ * inv_sqrt_ * t * inv_sqrt_ * v_.adjoint()));
}

ConditionalPOVM build_conditional(const LatticeLocalizationSystem& sys, const CellSet& delta0,
                                  const std::optional<Matrix>& v) {
  if (delta0.lattice_size() != sys.n) {
    throw std::invalid_argument("build_conditional: lattice size mismatch");
  }
  std::map<std::size_t, Matrix> ops;
  for (std::size_t k : delta0.cells()) ops.emplace(k, sys.cell_effects[k]);
  return make_conditional(delta0, std::move(ops), v);
}

ConditionalPOVM build_conditional_from_unnormalized(
    const std::vector<std::pair<CellSet, Matrix>>& family, const CellSet& delta0) {
  std::map<std::size_t, Matrix> ops;
  for (const auto& [set, op] : family) {
    if (set.size() == 1) ops.emplace(set.cells().front(), op);
  }
  for (std::size_t k : delta0.cells()) {
    if (!ops.count(k)) {
      throw std::invalid_argument("unnormalized family: no operator for cell " + std::to_string(k));
    }
    if (min_eigenvalue(ops.at(k)) < -kDefaultTol * std::max(1.0, op_norm(ops.at(k)))) {
      throw std::invalid_argument("unnormalized family: operator for cell " + std::to_string(k) +
                                  " is not positive");
    }
  }
  for (const auto& [set, op] : family) {
    if (set.size() < 2) continue;
    Matrix sum = Matrix::Zero(op.rows(), op.cols());
    bool covered = true;
    for (std::size_t k : set.cells()) {
      auto it = ops.find(k);
      if (it == ops.end()) {
        covered = false;
        break;
      }
      sum += it->second;
    }
    if (covered && op_norm(sum - op) > kDefaultTol * std::max(1.0, op_norm(op))) {
      throw std::invalid_argument("unnormalized family: not additive on " + set.to_string());
    }
  }
  std::map<std::size_t, Matrix> lab_ops;
  for (std::size_t k : delta0.cells()) lab_ops.emplace(k, ops.at(k));
  return make_conditional(delta0, std::move(lab_ops), std::nullopt);
}

GentleBoundReport gentle_bound(const Effect& t, const DensityState& rho) {
  const Matrix& tm = t.matrix();
  const Matrix& r = rho.matrix();
  const double p = (r * tm).trace().real();
  if (!(p > kProbFloor)) {
    throw std::domain_error("gentle_bound: tr(rho T) = " + std::to_string(p) + " is not positive");
  }
  GentleBoundReport out;
  out.delta = std::clamp(1.0 - p / op_norm(tm), 0.0, 1.0);
  const Matrix root = psd_sqrt(tm);
  out.lhs_trace_dist = trace_norm(hermitian_part(r - root * r * root / p));
  out.rhs_bound = 2.0 * std::sqrt(out.delta) + out.delta;
  out.margin = out.rhs_bound - out.lhs_trace_dist;
  out.report = CheckReport("gentle_bound");
  out.report.info("delta", out.delta)
      .info("lhs", out.lhs_trace_dist)
      .info("rhs", out.rhs_bound)
      .at_least("margin", out.margin, -1e-9);
  return out;
}

CheckReport conditional_prob_bound(const LatticeLocalizationSystem& sys, const CellSet& delta,
                                   const CellSet& delta0, const DensityState& rho) {
  if (!delta.subset_of(delta0)) {
    throw std::invalid_argument("conditional_prob_bound: Delta is not inside Delta0");
  }
  const ConditionalPOVM cond = build_conditional(sys, delta0);
  const Matrix& r = rho.matrix();
  const Matrix a0 = effect_of(sys, delta0).matrix();
  const Matrix a = effect_of(sys, delta).matrix();
  const Matrix b = cond.effect(delta).matrix();

  const double p0 = (r * a0).trace().real();
  if (!(p0 > kProbFloor)) {
    throw std::domain_error("conditional_prob_bound: lab detection probability vanishes");
  }
  const double delta_plain = 1.0 - p0;
  const double delta_tight = std::clamp(1.0 - p0 / op_norm(a0), 0.0, 1.0);
  const double bound = 2.0 * std::sqrt(delta_tight) + delta_tight;
  const double fraction = (r * a).trace().real() / p0;
  const double conditional = (r * b).trace().real();
  const double diff = std::abs(conditional - fraction);

  // tr(rho^I B) with rho^I = sqrt(A0) rho sqrt(A0) / tr(rho A0).
  const Matrix rho_lab = cond.sqrt_lab() * r * cond.sqrt_lab() / p0;
  const double op_form = std::abs((rho_lab * b).trace().real() - conditional);

  CheckReport rep("conditional_bound");
  rep.info("delta", delta_tight)
      .info("delta_unscaled", delta_plain)
      .info("fraction", fraction)
      .info("conditional_probability", conditional)
      .info("bound", bound)
      .at_most("difference", diff, bound + 1e-9)
      .at_most("operator_norm_form", op_form, bound * op_norm(b) + 1e-9)
      .info("lab_conditioned_vs_fraction", std::abs((rho_lab * b).trace().real() - fraction));
  if (bound >= 1.0) rep.note("vacuous bound: 2 sqrt(delta) + delta >= 1");
  return rep;
}

CheckReport v_conjugation_reduction(const LatticeLocalizationSystem& sys, const CellSet& delta0,
                                    const Matrix& v) {
  const ConditionalPOVM with_v = build_conditional(sys, delta0, v);
  const LatticeLocalizationSystem moved = conjugated(sys, v);
  const ConditionalPOVM from_moved = build_conditional(moved, delta0);

  std::vector<CellSet> samples{delta0};
  const auto& cells = delta0.cells();
  for (std::size_t i = 0; i < cells.size(); ++i) {
    samples.emplace_back(sys.n, std::vector<std::size_t>{cells[i]});
    samples.emplace_back(sys.n, std::vector<std::size_t>(cells.begin(), cells.begin() + static_cast<long>(i) + 1));
  }
  double worst = 0.0;
  for (const auto& s : samples) {
    worst = std::max(worst, op_norm(with_v.effect(s).matrix() - from_moved.effect(s).matrix()));
  }
  const RealVector e0 = hermitian_eigenvalues(sys.hamiltonian);
  const RealVector e1 = hermitian_eigenvalues(moved.hamiltonian);
  const double spectrum = (e0 - e1).cwiseAbs().maxCoeff();
  const double scale = std::max(1.0, e0.cwiseAbs().maxCoeff());

  CheckReport rep("v_conjugation");
  rep.at_most("effect_residual", worst, 1e-10)
      .at_most("spectrum_residual", spectrum, 1e-10 * scale)
      .info("samples", static_cast<double>(samples.size()));
  return rep;
}

namespace {

std::vector<CellSet> subsets(const CellSet& joint) {
  const auto& c = joint.cells();
  const std::size_t m = c.size();
  const std::size_t total = m >= 63 ? ~std::size_t{0} : (std::size_t{1} << m);
  const std::size_t limit = 1024;
  const std::size_t stride = total <= limit ? 1 : total / limit;
  std::vector<CellSet> out;
  for (std::size_t mask = 0; mask < total && out.size() < limit + 1; mask += stride) {
    std::vector<std::size_t> pick;
    for (std::size_t i = 0; i < m; ++i) {
      if (mask >> i & 1U) pick.push_back(c[i]);
    }
    out.emplace_back(joint.lattice_size(), std::move(pick));
  }
  if (total > limit) out.push_back(joint);
  return out;
}

}  // namespace

CheckReport composition_identity_check(const LatticeLocalizationSystem& sys, const CellSet& delta0,
                                       const CellSet& delta0_prime) {
  if (!delta0.disjoint(delta0_prime)) {
    throw std::invalid_argument("composition_identity_check: labs overlap");
  }
  const CellSet joint = delta0.united(delta0_prime);
  const ConditionalPOVM b1 = build_conditional(sys, delta0);
  const ConditionalPOVM b2 = build_conditional(sys, delta0_prime);
  const ConditionalPOVM b12 = build_conditional(sys, joint);

  double identity_res = 0.0;
  double additivity_failure = 0.0;
  const auto sample = subsets(joint);
  for (const auto& d : sample) {
    const CellSet in1 = d.intersected(delta0);
    const CellSet in2 = d.intersected(delta0_prime);
    const Matrix lhs = b12.effect(d).matrix();
    const Matrix m1 = b1.effect(in1).matrix();
    const Matrix m2 = b2.effect(in2).matrix();
    const Matrix inner = b1.sqrt_lab() * m1 * b1.sqrt_lab() + b2.sqrt_lab() * m2 * b2.sqrt_lab();
    const Matrix rhs = b12.inv_sqrt() * inner * b12.inv_sqrt();
    identity_res = std::max(identity_res, op_norm(lhs - rhs));
    additivity_failure = std::max(additivity_failure, op_norm(lhs - m1 - m2));
  }
  CheckReport rep("composition");
  rep.at_most("identity_residual", identity_res, 1e-10)
      .info("cross_lab_additivity_failure", additivity_failure)
      .info("subsets", static_cast<double>(sample.size()));
  return rep;
}

CrossLabCommutator cross_lab_commutator(const LatticeLocalizationSystem& sys_a,
                                        const CellSet& delta0, const CellSet& delta,
                                        const LatticeLocalizationSystem& sys_b,
                                        const CellSet& delta0_prime, const CellSet& delta_prime) {
  if (sys_a.n != sys_b.n) throw std::invalid_argument("cross_lab_commutator: lattice size mismatch");
  const ConditionalPOVM ba = build_conditional(sys_a, delta0);
  const ConditionalPOVM bb = build_conditional(sys_b, delta0_prime);
  CrossLabCommutator out;
  out.value = op_norm(commutator(ba.effect(delta).matrix(), bb.effect(delta_prime).matrix()));
  out.distance = lattice_distance(sys_a, delta0, delta0_prime);

  const RegionUnion ra = cells_region(sys_a, delta0);
  const RegionUnion rb = cells_region(sys_b, delta0_prime);
  const double period = static_cast<double>(sys_a.n) * sys_a.a;
  out.separated = causally_separated(ra, rb) &&
                  causally_separated(ra, rb.translated({0.0, period, 0.0, 0.0})) &&
                  causally_separated(ra, rb.translated({0.0, -period, 0.0, 0.0}));
  out.report = CheckReport("cross_lab_commutator");
  out.report.info("commutator", out.value)
      .info("lab_distance", out.distance)
      .info("causally_separated", out.separated ? 1.0 : 0.0)
      .note("measurement only: no commutativity verdict is asserted");
  return out;
}

}  // namespace relloc
