#include <cmath>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "relloc/measurement.hpp"
#include "relloc/random.hpp"
#include "relloc/serialize.hpp"

using namespace relloc;

namespace {

Matrix diag2(double a, double b) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

Matrix ket_plus_proj() {
  Matrix m(2, 2);
  m << 0.5, 0.5, 0.5, 0.5;
  return m;
}

Matrix ket_minus_proj() {
  Matrix m(2, 2);
  m << 0.5, -0.5, -0.5, 0.5;
  return m;
}

Matrix pauli_x() {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 1) = 1;
  m(1, 0) = 1;
  return m;
}

bool has_note(const CheckReport& r, const std::string& text) {
  for (const auto& n : r.notes()) {
    if (n.find(text) != std::string::npos) return true;
  }
  return false;
}

}  // namespace

// ---------------------------------------------------------------------------
// linalg

TEST(Linalg, SquareRootExamples) {
  EXPECT_LE(op_norm(psd_sqrt(identity(3)) - identity(3)), 1e-15);
  EXPECT_LE(op_norm(psd_sqrt(diag2(4, 9)) - diag2(2, 3)), 1e-14);
  EXPECT_THROW(psd_sqrt(pauli_x() * Complex(0, 1)), std::invalid_argument);
}

TEST(Linalg, SquareRootSquaresBackAndMatchesIteration) {
  Rng rng(1);
  for (int i = 0; i < 50; ++i) {
    const Eigen::Index d = 2 + static_cast<Eigen::Index>(rng.index(7));
    const Matrix g = ginibre(rng, d, d);
    const Matrix m = g * g.adjoint() + 0.1 * identity(d);
    const Matrix r = psd_sqrt(m);
    EXPECT_LE(op_norm(r * r - m), 1e-10 * op_norm(m));
    EXPECT_LE(op_norm(r - oracle::sqrtm_pd(m)), 1e-9);
  }
}

TEST(Linalg, InverseSquareRootRespectsFloor) {
  EXPECT_LE(op_norm(psd_inv_sqrt(diag2(4, 0.25), 1e-8) - diag2(0.5, 2)), 1e-14);
  EXPECT_THROW(psd_inv_sqrt(diag2(1, 0), 1e-8), std::domain_error);
}

TEST(Linalg, NormExamples) {
  EXPECT_DOUBLE_EQ(trace_norm(diag2(1, -1)), 2.0);
  EXPECT_NEAR(trace_norm(ket_plus_proj()), 1.0, 1e-15);
  EXPECT_NEAR(op_norm(pauli_x()), 1.0, 1e-15);
}

TEST(Linalg, TraceNormMatchesJacobiSvd) {
  Rng rng(2);
  for (int i = 0; i < 100; ++i) {
    const Eigen::Index d = 2 + static_cast<Eigen::Index>(rng.index(7));
    const Matrix diff = random_state(rng, d).matrix() - random_state(rng, d).matrix();
    EXPECT_NEAR(trace_norm(diff), oracle::trace_norm(diff), 1e-12);
    const Matrix g = ginibre(rng, d, d);
    EXPECT_NEAR(trace_norm(g), oracle::trace_norm(g), 1e-11);
    EXPECT_NEAR(op_norm(g), oracle::op_norm(g), 1e-11);
  }
}

TEST(Linalg, UnitaryEvolutionMatchesTaylorExponential) {
  Rng rng(3);
  for (int i = 0; i < 20; ++i) {
    const Eigen::Index d = 2 + static_cast<Eigen::Index>(rng.index(6));
    const Matrix g = ginibre(rng, d, d);
    const Matrix h = hermitian_part(g);
    const double t = rng.uniform(-2, 2);
    const Matrix u = unitary_evolution(h, t);
    EXPECT_LE(unitarity_residual(u), 1e-12);
    EXPECT_LE(op_norm(u - oracle::expm(Complex(0, -t) * h)), 1e-11);
  }
}

// ---------------------------------------------------------------------------
// validation

TEST(Validate, EffectExamples) {
  const CheckReport half = validate_effect_matrix(0.5 * identity(2));
  EXPECT_TRUE(half.passed());
  EXPECT_EQ(half.value("negativity"), 0.0);
  EXPECT_EQ(half.value("excess_over_identity"), 0.0);
  const CheckReport big = validate_effect_matrix(diag2(1.2, 0));
  EXPECT_FALSE(big.passed());
  EXPECT_TRUE(has_note(big, "max eigenvalue > 1"));
  EXPECT_TRUE(has_note(validate_effect_matrix(diag2(0.5, -0.1)), "min eigenvalue < 0"));
  EXPECT_TRUE(has_note(validate_effect_matrix(pauli_x() * Complex(0, 1)), "not Hermitian"));
  EXPECT_THROW(Effect(diag2(1.2, 0)), std::invalid_argument);
}

TEST(Validate, PovmExamples) {
  EXPECT_TRUE(validate(DiscretePOVM::unchecked({Effect(diag2(0.5, 0.5)), Effect(diag2(0.5, 0.5))})).passed());
  const CheckReport under = validate(DiscretePOVM::unchecked({Effect(diag2(0.5, 0.5)), Effect(diag2(0.4, 0.5))}));
  EXPECT_FALSE(under.passed());
  EXPECT_TRUE(has_note(under, "do not sum to the identity"));
  EXPECT_THROW(DiscretePOVM({identity(2), Matrix::Zero(2, 2)}), std::invalid_argument);
  ValidationOptions lax;
  lax.require_nonzero = false;
  EXPECT_NO_THROW(DiscretePOVM({identity(2), Matrix::Zero(2, 2)}, {}, lax));
}

TEST(Validate, StateExamples) {
  EXPECT_TRUE(validate(DensityState(0.5 * identity(2))).passed());
  EXPECT_TRUE(has_note(validate_state_matrix(identity(2)), "trace != 1"));
}

// ---------------------------------------------------------------------------
// instruments and post-measurement states

TEST(Instrument, LudersExamples) {
  const KrausInstrument proj = luders_instrument(DiscretePOVM({diag2(1, 0), diag2(0, 1)}));
  EXPECT_LE(op_norm(proj.family(0)[0] - diag2(1, 0)), 1e-15);
  EXPECT_LE(op_norm(proj.family(1)[0] - diag2(0, 1)), 1e-15);
  const KrausInstrument trivial = luders_instrument(DiscretePOVM({identity(3)}));
  EXPECT_LE(op_norm(trivial.family(0)[0] - identity(3)), 1e-15);
  const KrausInstrument q = luders_instrument(DiscretePOVM({diag2(.36, .64), diag2(.64, .36)}));
  EXPECT_LE(op_norm(q.family(0)[0] - diag2(.6, .8)), 1e-15);
  EXPECT_LE(op_norm(q.family(1)[0] - diag2(.8, .6)), 1e-15);
  EXPECT_TRUE(q.efficient());
}

TEST(Instrument, PolarKraus) {
  const Effect t(diag2(1, 0));
  EXPECT_LE(op_norm(polar_kraus(t, identity(2)) - diag2(1, 0)), 1e-15);
  const Matrix k = polar_kraus(t, pauli_x());
  EXPECT_LE(op_norm(k - pauli_x() * diag2(1, 0)), 1e-15);
  EXPECT_LE(op_norm(k.adjoint() * k - t.matrix()), 1e-15);
  Rng rng(4);
  for (int i = 0; i < 20; ++i) {
    const Effect e = random_effect(rng, 4);
    const Matrix kk = polar_kraus(e, haar_unitary(rng, 4));
    EXPECT_LE(op_norm(kk.adjoint() * kk - e.matrix()), 1e-10);
  }
  // Non-isometric V on the range of sqrt(T) is refused.
  EXPECT_THROW(polar_kraus(Effect(identity(2) * 0.5), diag2(1, 0.5)), std::invalid_argument);
  // Only the range matters: V may be anything on the kernel.
  EXPECT_NO_THROW(polar_kraus(t, diag2(1, 0.5)));
}

TEST(Instrument, RejectsNonNormalizedFamilies) {
  EXPECT_THROW(KrausInstrument({{diag2(0.5, 0.5)}}), std::invalid_argument);
  EXPECT_THROW(KrausInstrument(std::vector<std::vector<Matrix>>{}), std::invalid_argument);
  EXPECT_THROW(KrausInstrument({{identity(2)}, {}}), std::invalid_argument);
}

TEST(PostState, SelectiveExamples) {
  const KrausInstrument proj = luders_instrument(DiscretePOVM({diag2(1, 0), diag2(0, 1)}));
  const DensityState on_p(diag2(1, 0));
  const SelectiveOutcome o = selective_post_state(on_p, proj, 0);
  EXPECT_NEAR(o.probability, 1.0, 1e-15);
  EXPECT_LE(op_norm(o.state.matrix() - on_p.matrix()), 1e-15);

  const KrausInstrument trivial = luders_instrument(DiscretePOVM({identity(2)}));
  const DensityState mixed(diag2(0.3, 0.7));
  const SelectiveOutcome t = selective_post_state(mixed, trivial, 0);
  EXPECT_NEAR(t.probability, 1.0, 1e-15);
  EXPECT_LE(op_norm(t.state.matrix() - mixed.matrix()), 1e-15);

  const KrausInstrument q = luders_instrument(DiscretePOVM({diag2(.36, .64), diag2(.64, .36)}));
  const SelectiveOutcome h = selective_post_state(DensityState(0.5 * identity(2)), q, 0);
  EXPECT_NEAR(h.probability, 0.5, 1e-15);
  EXPECT_LE(op_norm(h.state.matrix() - diag2(.36, .64)), 1e-15);

  EXPECT_THROW(selective_post_state(on_p, proj, 1), std::domain_error);
  EXPECT_THROW(selective_post_state(on_p, proj, 2), std::out_of_range);
}

TEST(PostState, NonSelectiveExamples) {
  const KrausInstrument trivial = luders_instrument(DiscretePOVM({identity(2)}));
  const DensityState plus(ket_plus_proj());
  EXPECT_LE(op_norm(nonselective_post_state(plus, trivial).matrix() - plus.matrix()), 1e-15);
  const KrausInstrument proj = luders_instrument(DiscretePOVM({diag2(1, 0), diag2(0, 1)}));
  EXPECT_LE(op_norm(nonselective_post_state(plus, proj).matrix() - 0.5 * identity(2)), 1e-15);
  const DensityState diag_state(diag2(0.2, 0.8));
  EXPECT_LE(op_norm(nonselective_post_state(diag_state, proj).matrix() - diag_state.matrix()), 1e-15);
}

TEST(PostState, NonSelectiveIsTracePreservingAndDualToHeisenberg) {
  Rng rng(5);
  for (int i = 0; i < 50; ++i) {
    const Eigen::Index d = 2 + static_cast<Eigen::Index>(rng.index(5));
    const KrausInstrument instr = random_instrument(rng, d, 2 + rng.index(2), 1 + rng.index(3));
    const DensityState rho = random_state(rng, d);
    const Matrix post = nonselective_post_state(rho, instr).matrix();
    EXPECT_NEAR(post.trace().real(), 1.0, 1e-12);
    EXPECT_TRUE(validate_state_matrix(post).passed());
    const Effect s = random_effect(rng, d);
    EXPECT_NEAR((post * s.matrix()).trace().real(),
                (rho.matrix() * dual_map(instr, s.matrix())).trace().real(), 1e-12);
  }
}

TEST(SequentialProb, Examples) {
  const KrausInstrument pm = luders_instrument(DiscretePOVM({ket_plus_proj(), ket_minus_proj()}));
  const DensityState zero(diag2(1, 0));
  EXPECT_NEAR(sequential_joint_prob(zero, pm, 0, Effect(diag2(1, 0))), 0.25, 1e-15);
  // Second effect I marginalizes to tr(rho T_j).
  Rng rng(6);
  const DensityState rho = random_state(rng, 2);
  EXPECT_NEAR(sequential_joint_prob(rho, pm, 1, Effect(identity(2))),
              (rho.matrix() * ket_minus_proj()).trace().real(), 1e-15);
  // Commuting diagonal case is a product of classical probabilities.
  const KrausInstrument d = luders_instrument(DiscretePOVM({diag2(.3, .9), diag2(.7, .1)}));
  const DensityState r(diag2(0.4, 0.6));
  EXPECT_NEAR(sequential_joint_prob(r, d, 0, Effect(diag2(0.5, 0.2))), 0.4 * 0.3 * 0.5 + 0.6 * 0.9 * 0.2,
              1e-15);
  // Annihilated outcomes contribute zero rather than failing.
  const KrausInstrument proj = luders_instrument(DiscretePOVM({diag2(1, 0), diag2(0, 1)}));
  EXPECT_EQ(sequential_joint_prob(zero, proj, 1, Effect(identity(2))), 0.0);
}

// ---------------------------------------------------------------------------
// random generation

TEST(Random, DeterministicAndSeedSensitive) {
  Rng a(42), b(42), c(43);
  for (int i = 0; i < 10; ++i) EXPECT_EQ(a.next_u64(), b.next_u64());
  EXPECT_NE(Rng(42).next_u64(), c.next_u64());
  EXPECT_NE(derive_seed(1, 0, 0), derive_seed(1, 1, 0));
  EXPECT_NE(derive_seed(1, 0, 0), derive_seed(1, 0, 1));
  EXPECT_EQ(derive_seed(9, 3, 2), derive_seed(9, 3, 2));
}

TEST(Random, UniformAndIndexRanges) {
  Rng rng(7);
  double sum = 0.0;
  for (int i = 0; i < 20000; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
    ASSERT_LT(rng.index(5), 5u);
  }
  EXPECT_NEAR(sum / 20000, 0.5, 0.01);
}

TEST(Random, GeneratedObjectsAreValid) {
  Rng rng(8);
  for (int i = 0; i < 50; ++i) {
    const Eigen::Index d = 1 + static_cast<Eigen::Index>(rng.index(8));
    EXPECT_LE(unitarity_residual(haar_unitary(rng, d)), 1e-12);
    const DensityState rho = random_state(rng, d);
    EXPECT_TRUE(validate(rho, 1e-12).passed());
    EXPECT_NEAR(rho.matrix().trace().real(), 1.0, 1e-12);
    EXPECT_TRUE(validate(random_effect(rng, d), 1e-12).passed());
    EXPECT_TRUE(validate(random_povm(rng, d, 3)).passed());
    EXPECT_TRUE(validate(random_instrument(rng, d, 2, 2)).passed());
    const PovmPair pair = commuting_pair(rng, d, 2, 3);
    EXPECT_TRUE(validate(pair.first).passed());
    EXPECT_TRUE(validate(pair.second).passed());
    for (const auto& t : pair.first.effects()) {
      for (const auto& s : pair.second.effects()) {
        EXPECT_LE(op_norm(commutator(t.matrix(), s.matrix())), 1e-12);
      }
    }
    const RealVector p = random_simplex(rng, 4);
    EXPECT_NEAR(p.sum(), 1.0, 1e-15);
    EXPECT_GE(p.minCoeff(), 0.0);
  }
}

TEST(Random, RankOfRandomState) {
  Rng rng(9);
  const DensityState rho = random_state(rng, 5, 2);
  const RealVector ev = hermitian_eigenvalues(rho.matrix());
  EXPECT_LE(std::abs(ev(0)) + std::abs(ev(1)) + std::abs(ev(2)), 1e-12);
  EXPECT_GT(ev(3), 1e-6);
}

// ---------------------------------------------------------------------------
// serialization

TEST(Serialize, MatrixRoundTripIsBitExact) {
  Rng rng(10);
  const Matrix m = ginibre(rng, 4, 4);
  const Matrix back = matrix_from_json(json::parse(to_json(m).dump()));
  EXPECT_EQ(back, m);
}

TEST(Serialize, ObjectsRoundTrip) {
  Rng rng(11);
  const KrausInstrument instr = random_instrument(rng, 3, 2, 2);
  const KrausInstrument instr2 = instrument_from_json(json::parse(to_json(instr).dump()));
  ASSERT_EQ(instr2.outcomes(), instr.outcomes());
  EXPECT_EQ(instr2.family(1)[1], instr.family(1)[1]);
  const DiscretePOVM povm = random_povm(rng, 3, 3);
  EXPECT_EQ(povm_from_json(to_json(povm)).effects()[2].matrix(), povm.effects()[2].matrix());
  const DensityState rho = random_state(rng, 3);
  EXPECT_EQ(state_from_json(to_json(rho)).matrix(), rho.matrix());
}

TEST(Serialize, SchemaErrorsCarryPointers) {
  json bad = {{"dim", 2}, {"re", {1, 0, 0}}, {"im", {0, 0, 0, 0}}};
  try {
    matrix_from_json(bad, "/x");
    FAIL() << "expected SchemaError";
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.pointer().rfind("/x", 0), 0u);
  }
  json povm = {{"type", "povm"}, {"effects", json::array({to_json(diag2(0.5, 0.5))})}};
  try {
    povm_from_json(povm, "/p");
    FAIL() << "expected SchemaError";
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.pointer().rfind("/p", 0), 0u);
  }
}

TEST(Serialize, ReportRoundTripIsBitExact) {
  CheckReport r("demo");
  r.at_most("a", 1.0 / 3.0, 1e-10).at_least("b", std::sqrt(2.0), 1.0).info("c", M_PI).note("hello");
  r.witnesses()["m"] = to_json(diag2(1, 2));
  const CheckReport back = report_from_json(json::parse(to_json(r).dump()));
  ASSERT_EQ(back.residuals().size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(back.residuals()[i].value, r.residuals()[i].value);
    EXPECT_EQ(back.residuals()[i].threshold, r.residuals()[i].threshold);
  }
  EXPECT_EQ(back.verdict(), r.verdict());
  EXPECT_EQ(back.notes(), r.notes());
}

TEST(Report, VerdictRules) {
  CheckReport info("i");
  info.info("x", 5);
  EXPECT_EQ(info.verdict(), Verdict::Info);
  CheckReport pass("p");
  pass.at_most("x", 1, 1);
  EXPECT_EQ(pass.verdict(), Verdict::Pass);
  pass.at_least("y", 0.5, 1);
  EXPECT_EQ(pass.verdict(), Verdict::Fail);
}

TEST(Report, MergeKeepsTightestMargin) {
  CheckReport a("m");
  a.at_most("x", 0.5, 1.0).at_least("y", 3.0, 1.0).info("z", 1.0);
  CheckReport b("m");
  b.at_most("x", 0.2, 0.1).at_least("y", 2.0, 1.0).info("z", 4.0);
  a.merge(b);
  EXPECT_EQ(a.find("x")->value, 0.2);
  EXPECT_EQ(a.find("x")->threshold, 0.1);
  EXPECT_EQ(a.value("y"), 2.0);
  EXPECT_EQ(a.value("z"), 4.0);
  EXPECT_EQ(a.verdict(), Verdict::Fail);
}
