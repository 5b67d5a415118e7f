#include "relloc/causality.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace relloc {

namespace {

void require_dim(Eigen::Index a, Eigen::Index b, const char* what) {
  if (a != b) throw std::invalid_argument(std::string(what) + ": dimension mismatch");
}

void require_efficient(const KrausInstrument& instr) {
  if (!instr.efficient()) {
    throw std::invalid_argument("rcc_deviation: instrument is not efficient");
  }
}

}  // namespace

double nsc_deviation(const KrausInstrument& instr, const Matrix& s) {
  require_dim(instr.dim(), s.rows(), "nsc_deviation");
  return op_norm(dual_map(instr, s) - s);
}

double nsc_deviation(const KrausInstrument& instr, const Effect& s) {
  return nsc_deviation(instr, s.matrix());
}

double rcc_deviation(const KrausInstrument& first, const KrausInstrument& second) {
  require_efficient(first);
  require_efficient(second);
  require_dim(first.dim(), second.dim(), "rcc_deviation");
  double worst = 0.0;
  for (std::size_t j = 0; j < first.outcomes(); ++j) {
    const Matrix& kt = first.family(j).front();
    const Matrix& tj = first.povm()[j].matrix();
    for (std::size_t i = 0; i < second.outcomes(); ++i) {
      const Matrix& ks = second.family(i).front();
      const Matrix& si = second.povm()[i].matrix();
      const Matrix diff = kt.adjoint() * si * kt - ks.adjoint() * tj * ks;
      worst = std::max(worst, op_norm(diff));
    }
  }
  return worst;
}

double commutator_residual(const DiscretePOVM& t, const DiscretePOVM& s) {
  require_dim(t.dim(), s.dim(), "commutator_residual");
  double worst = 0.0;
  for (const auto& tj : t.effects()) {
    for (const auto& si : s.effects()) {
      worst = std::max(worst, op_norm(commutator(tj.matrix(), si.matrix())));
    }
  }
  return worst;
}

double effect_commutator_residual(const DiscretePOVM& t, const Matrix& s) {
  require_dim(t.dim(), s.rows(), "effect_commutator_residual");
  double worst = 0.0;
  for (const auto& tj : t.effects()) worst = std::max(worst, op_norm(commutator(tj.matrix(), s)));
  return worst;
}

double kraus_commutator_residual(const KrausInstrument& instr, const Matrix& s) {
  require_dim(instr.dim(), s.rows(), "kraus_commutator_residual");
  double worst = 0.0;
  for (const auto& fam : instr.families()) {
    for (const auto& k : fam) {
      worst = std::max({worst, op_norm(commutator(k, s)), op_norm(commutator(k.adjoint(), s))});
    }
  }
  return worst;
}

DeviationReport luders_equivalence_check(const DiscretePOVM& t, const DiscretePOVM& s,
                                         double tol) {
  DeviationReport out;
  out.report = CheckReport("luders_equivalence");
  const KrausInstrument lt = luders_instrument(t);
  const KrausInstrument ls = luders_instrument(s);
  double scale = 0.0;
  for (const auto& si : s.effects()) {
    out.nsc_dev = std::max(out.nsc_dev, nsc_deviation(lt, si));
    scale = std::max(scale, op_norm(si.matrix()));
  }
  out.rcc_dev = rcc_deviation(lt, ls);
  out.commutator_residual = commutator_residual(t, s);

  const bool commuting = out.commutator_residual <= tol;
  const bool causal = out.nsc_dev <= tol * scale && out.rcc_dev <= tol * scale;
  auto& r = out.report;
  r.info("nsc_deviation", out.nsc_dev)
      .info("rcc_deviation", out.rcc_dev)
      .info("commutator_residual", out.commutator_residual)
      .info("scale", scale)
      .require("biconditional", commuting == causal)
      .note(kRccProductFormNote);
  if (commuting != causal) {
    r.note(commuting ? "counterexample candidate: commuting effects with nonzero deviation"
                     : "counterexample candidate: noncommuting effects with zero deviation");
  }
  return out;
}

DeviationReport beck_check(const KrausInstrument& instr, const Effect& s, double tol) {
  DeviationReport out;
  out.report = CheckReport("beck");
  const Matrix& sm = s.matrix();
  const double scale = op_norm(sm);
  out.nsc_dev = nsc_deviation(instr, sm);
  out.nsc_sq_dev = nsc_deviation(instr, Matrix(sm * sm));
  out.kraus_commutator_residual = kraus_commutator_residual(instr, sm);
  out.commutator_residual = effect_commutator_residual(instr.povm(), sm);

  const bool kraus_commute = out.kraus_commutator_residual <= tol;
  const bool both_nsc = out.nsc_dev <= tol * scale && out.nsc_sq_dev <= tol * scale;
  auto& r = out.report;
  r.info("d1", out.nsc_dev)
      .info("d2", out.nsc_sq_dev)
      .info("kappa", out.kraus_commutator_residual)
      .info("effect_commutator", out.commutator_residual)
      .info("scale", scale)
      .require("biconditional", kraus_commute == both_nsc);
  if (kraus_commute) {
    // [K, S] = [K^dagger, S] = 0 gives [K^dagger K, S] = 0, with error <= 2 ||K|| kappa.
    std::size_t widest = 0;
    for (const auto& fam : instr.families()) widest = std::max(widest, fam.size());
    r.at_most("effect_commutator_implied", out.commutator_residual,
              2.0 * static_cast<double>(widest) * tol);
  }
  if (kraus_commute != both_nsc) r.note("counterexample candidate");
  if (!kraus_commute && out.nsc_dev <= tol * scale && out.nsc_sq_dev > tol * scale) {
    r.note("first-moment no-signaling holds while the second moment signals");
  }
  return out;
}

InstrumentEffect heinosaari_wolf_example() {
  Matrix k0 = Matrix::Zero(3, 3);
  k0(0, 0) = 1.0;
  k0(1, 1) = 1.0;
  Matrix k1 = Matrix::Zero(3, 3);
  k1(0, 2) = 1.0 / std::sqrt(2.0);
  Matrix k2 = Matrix::Zero(3, 3);
  k2(1, 2) = 1.0 / std::sqrt(2.0);
  Matrix s = Matrix::Zero(3, 3);
  s(0, 0) = 1.0;
  s(2, 2) = 0.5;
  return {KrausInstrument({{k0}, {k1, k2}}), Effect(s)};
}

}  // namespace relloc
