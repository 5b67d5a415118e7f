#include "relloc/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace relloc {

namespace {

double scale_of(const Matrix& m) { return std::max(1.0, op_norm(m)); }

void throw_if_failed(const CheckReport& report, const std::string& what) {
  if (report.passed()) return;
  std::string msg = what + ": invalid";
  for (const auto& n : report.notes()) msg += "; " + n;
  throw std::invalid_argument(msg);
}

void add_effect_checks(CheckReport& report, const Matrix& m, double tol, const std::string& prefix) {
  if (!is_square(m)) {
    report.require(prefix + "square", false).note(prefix + "matrix is not square");
    return;
  }
  const double scale = scale_of(m);
  const double herm = hermiticity_residual(m);
  const RealVector ev = hermitian_eigenvalues(m);
  const double negativity = std::max(0.0, -ev.minCoeff());
  const double excess = std::max(0.0, ev.maxCoeff() - 1.0);
  report.at_most(prefix + "hermiticity", herm, tol * scale);
  report.at_most(prefix + "negativity", negativity, tol * scale);
  report.at_most(prefix + "excess_over_identity", excess, tol * scale);
  if (herm > tol * scale) report.note(prefix + "not Hermitian");
  if (negativity > tol * scale) report.note(prefix + "min eigenvalue < 0");
  if (excess > tol * scale) report.note(prefix + "max eigenvalue > 1");
}

}  // namespace

Effect::Effect(Matrix m, double tol) : m_(std::move(m)) {
  throw_if_failed(validate_effect_matrix(m_, tol), "Effect");
}

Effect Effect::unchecked(Matrix m) {
  Effect e;
  e.m_ = std::move(m);
  return e;
}

DensityState::DensityState(Matrix m, double tol) : m_(std::move(m)) {
  throw_if_failed(validate_state_matrix(m_, tol), "DensityState");
}

DensityState DensityState::unchecked(Matrix m) {
  DensityState s;
  s.m_ = std::move(m);
  return s;
}

DensityState DensityState::pure(const Vector& psi) {
  const double norm2 = psi.squaredNorm();
  if (!(norm2 > 0.0)) throw std::invalid_argument("DensityState::pure: zero vector");
  return unchecked(psi * psi.adjoint() / norm2);
}

DiscretePOVM::DiscretePOVM(std::vector<Matrix> effects, std::vector<std::string> labels,
                           const ValidationOptions& opts)
    : labels_(std::move(labels)) {
  effects_.reserve(effects.size());
  for (auto& m : effects) effects_.push_back(Effect::unchecked(std::move(m)));
  if (labels_.empty()) {
    for (std::size_t j = 0; j < effects_.size(); ++j) labels_.push_back(std::to_string(j));
  }
  if (labels_.size() != effects_.size()) {
    throw std::invalid_argument("DiscretePOVM: label count does not match effect count");
  }
  throw_if_failed(validate(*this, opts), "DiscretePOVM");
}

DiscretePOVM DiscretePOVM::unchecked(std::vector<Effect> effects, std::vector<std::string> labels) {
  DiscretePOVM p;
  p.effects_ = std::move(effects);
  p.labels_ = std::move(labels);
  if (p.labels_.empty()) {
    for (std::size_t j = 0; j < p.effects_.size(); ++j) p.labels_.push_back(std::to_string(j));
  }
  return p;
}

DiscretePOVM DiscretePOVM::elementary(const Effect& e) {
  return unchecked({e, Effect::unchecked(identity(e.dim()) - e.matrix())}, {"click", "no_click"});
}

KrausInstrument::KrausInstrument(std::vector<std::vector<Matrix>> families,
                                 std::vector<std::string> labels, const ValidationOptions& opts)
    : families_(std::move(families)) {
  if (families_.empty()) throw std::invalid_argument("KrausInstrument: no outcomes");
  Eigen::Index dim = -1;
  std::vector<Effect> effects;
  effects.reserve(families_.size());
  for (const auto& fam : families_) {
    if (fam.empty()) throw std::invalid_argument("KrausInstrument: empty Kraus family");
    for (const auto& k : fam) {
      if (!is_square(k)) throw std::invalid_argument("KrausInstrument: Kraus operator not square");
      if (dim < 0) dim = k.rows();
      if (k.rows() != dim) throw std::invalid_argument("KrausInstrument: dimension mismatch");
    }
    Matrix t = Matrix::Zero(dim, dim);
    for (const auto& k : fam) t += k.adjoint() * k;
    effects.push_back(Effect::unchecked(std::move(t)));
  }
  povm_ = DiscretePOVM::unchecked(std::move(effects), std::move(labels));
  if (povm_.labels().size() != families_.size()) {
    throw std::invalid_argument("KrausInstrument: label count does not match outcome count");
  }
  throw_if_failed(validate(*this, opts), "KrausInstrument");
}

bool KrausInstrument::efficient() const {
  return std::all_of(families_.begin(), families_.end(),
                     [](const auto& fam) { return fam.size() == 1; });
}

CheckReport validate_effect_matrix(const Matrix& m, double tol) {
  CheckReport report("effect");
  add_effect_checks(report, m, tol, "");
  return report;
}

CheckReport validate_state_matrix(const Matrix& m, double tol) {
  CheckReport report("state");
  if (!is_square(m)) {
    report.require("square", false).note("matrix is not square");
    return report;
  }
  const double scale = scale_of(m);
  const double herm = hermiticity_residual(m);
  const double negativity = std::max(0.0, -min_eigenvalue(m));
  const double trace_dev = std::abs(m.trace() - Complex(1.0, 0.0));
  report.at_most("hermiticity", herm, tol * scale);
  report.at_most("negativity", negativity, tol * scale);
  report.at_most("trace_deviation", trace_dev, tol * scale);
  if (herm > tol * scale) report.note("not Hermitian");
  if (negativity > tol * scale) report.note("min eigenvalue < 0");
  if (trace_dev > tol * scale) report.note("trace != 1");
  return report;
}

CheckReport validate(const Effect& e, double tol) { return validate_effect_matrix(e.matrix(), tol); }

CheckReport validate(const DensityState& rho, double tol) {
  return validate_state_matrix(rho.matrix(), tol);
}

CheckReport validate(const DiscretePOVM& povm, const ValidationOptions& opts) {
  CheckReport report("povm");
  if (povm.size() == 0) {
    report.require("nonempty", false).note("POVM has no effects");
    return report;
  }
  const Eigen::Index dim = povm.dim();
  Matrix sum = Matrix::Zero(dim, dim);
  for (std::size_t j = 0; j < povm.size(); ++j) {
    const Matrix& t = povm[j].matrix();
    const std::string prefix = "T" + std::to_string(j) + ".";
    if (t.rows() != dim || t.cols() != dim) {
      report.require(prefix + "dimension", false).note(prefix + "dimension mismatch");
      return report;
    }
    add_effect_checks(report, t, opts.tol, prefix);
    const double norm = op_norm(t);
    if (opts.require_nonzero) {
      report.at_least(prefix + "norm", norm, opts.tol);
      if (norm < opts.tol) report.note(prefix + "zero effect");
    }
    if (opts.strict_positive) {
      const double lo = min_eigenvalue(t);
      report.at_least(prefix + "min_eigenvalue", lo, opts.tol);
      if (lo < opts.tol) report.note(prefix + "not strictly positive");
    }
    sum += t;
  }
  const double norm_res = op_norm(sum - identity(dim));
  report.at_most("normalization", norm_res, opts.tol);
  if (norm_res > opts.tol) report.note("effects do not sum to the identity");
  return report;
}

CheckReport validate(const KrausInstrument& instr, const ValidationOptions& opts) {
  CheckReport report = validate(instr.povm(), opts);
  double eq_residual = 0.0;
  for (std::size_t j = 0; j < instr.outcomes(); ++j) {
    Matrix t = Matrix::Zero(instr.dim(), instr.dim());
    for (const auto& k : instr.family(j)) t += k.adjoint() * k;
    eq_residual = std::max(eq_residual, op_norm(t - instr.povm()[j].matrix()));
  }
  report.at_most("kraus_effect_consistency", eq_residual, opts.tol);
  report.info("efficient", instr.efficient() ? 1.0 : 0.0);
  return report;
}

KrausInstrument luders_instrument(const DiscretePOVM& povm) {
  std::vector<std::vector<Matrix>> families;
  families.reserve(povm.size());
  for (const auto& e : povm.effects()) families.push_back({psd_sqrt(e.matrix())});
  ValidationOptions opts;
  opts.require_nonzero = false;
  return KrausInstrument(std::move(families), povm.labels(), opts);
}

Matrix polar_kraus(const Effect& t, const Matrix& v, double tol) {
  if (v.rows() != t.dim() || v.cols() != t.dim()) {
    throw std::invalid_argument("polar_kraus: dimension mismatch");
  }
  const Matrix root = psd_sqrt(t.matrix(), tol);
  // V^dagger V must act as the identity on Ran(sqrt T).
  const double residual = op_norm((v.adjoint() * v - identity(t.dim())) * root);
  if (residual > tol * std::max(1.0, op_norm(root))) {
    throw std::invalid_argument("polar_kraus: V is not isometric on the range of sqrt(T)");
  }
  return v * root;
}

SelectiveOutcome selective_post_state(const DensityState& rho, const KrausInstrument& instr,
                                      std::size_t outcome, double prob_floor) {
  if (outcome >= instr.outcomes()) throw std::out_of_range("selective_post_state: outcome");
  const double p = (rho.matrix() * instr.povm()[outcome].matrix()).trace().real();
  if (!(p > prob_floor)) {
    throw std::domain_error("selective_post_state: outcome probability " + std::to_string(p) +
                            " is below the floor");
  }
  Matrix out = Matrix::Zero(rho.dim(), rho.dim());
  for (const auto& k : instr.family(outcome)) out += k * rho.matrix() * k.adjoint();
  return {p, DensityState::unchecked(out / p)};
}

DensityState nonselective_post_state(const DensityState& rho, const KrausInstrument& instr) {
  Matrix out = Matrix::Zero(rho.dim(), rho.dim());
  for (const auto& fam : instr.families()) {
    for (const auto& k : fam) out += k * rho.matrix() * k.adjoint();
  }
  return DensityState::unchecked(std::move(out));
}

double sequential_joint_prob(const DensityState& rho, const KrausInstrument& first,
                             std::size_t outcome, const Effect& second) {
  if (outcome >= first.outcomes()) throw std::out_of_range("sequential_joint_prob: outcome");
  double p = 0.0;
  for (const auto& k : first.family(outcome)) {
    p += (second.matrix() * k * rho.matrix() * k.adjoint()).trace().real();
  }
  return p;
}

Matrix dual_map(const KrausInstrument& instr, const Matrix& x) {
  Matrix out = Matrix::Zero(x.rows(), x.cols());
  for (const auto& fam : instr.families()) {
    for (const auto& k : fam) out += k.adjoint() * x * k;
  }
  return out;
}

Matrix dual_map(const KrausInstrument& instr, std::size_t outcome, const Matrix& x) {
  Matrix out = Matrix::Zero(x.rows(), x.cols());
  for (const auto& k : instr.family(outcome)) out += k.adjoint() * x * k;
  return out;
}

}  // namespace relloc
