// Randomized search for an instrument whose dual map fixes an effect S but
// not S^2. Each candidate instrument comes with its exact fixed-point space
// (null space of Phi* - id on Hermitian matrices); S is then searched inside
// that space, so d1 stays at rounding level while coordinate perturbation
// pushes d2 up.

#include <algorithm>
#include <cmath>
#include <thread>

#include "relloc/causality.hpp"

namespace relloc {

namespace {

// Orthonormal basis of the Hermitian d x d matrices under the Hilbert-Schmidt
// inner product.
std::vector<Matrix> hermitian_basis(Eigen::Index d) {
  std::vector<Matrix> basis;
  const double r = 1.0 / std::sqrt(2.0);
  for (Eigen::Index i = 0; i < d; ++i) {
    Matrix e = Matrix::Zero(d, d);
    e(i, i) = 1.0;
    basis.push_back(e);
  }
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = i + 1; j < d; ++j) {
      Matrix re = Matrix::Zero(d, d);
      re(i, j) = r;
      re(j, i) = r;
      basis.push_back(re);
      Matrix im = Matrix::Zero(d, d);
      im(i, j) = Complex(0.0, -r);
      im(j, i) = Complex(0.0, r);
      basis.push_back(im);
    }
  }
  return basis;
}

Eigen::VectorXd coords(const std::vector<Matrix>& basis, const Matrix& x) {
  Eigen::VectorXd c(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t a = 0; a < basis.size(); ++a) {
    c(static_cast<Eigen::Index>(a)) = (basis[a].adjoint() * x).trace().real();
  }
  return c;
}

Matrix from_coords(const std::vector<Matrix>& basis, const Eigen::VectorXd& c) {
  Matrix x = Matrix::Zero(basis[0].rows(), basis[0].cols());
  for (std::size_t a = 0; a < basis.size(); ++a) x += c(static_cast<Eigen::Index>(a)) * basis[a];
  return x;
}

// Fixed points of the dual map orthogonal to the identity, as Hermitian
// matrices with unit Hilbert-Schmidt norm.
std::vector<Matrix> fixed_points(const KrausInstrument& instr) {
  const Eigen::Index d = instr.dim();
  const auto basis = hermitian_basis(d);
  const auto m = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXd l(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    const Matrix& b = basis[static_cast<std::size_t>(a)];
    l.col(a) = coords(basis, dual_map(instr, b) - b);
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(l, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cutoff = 1e-10 * std::max(1.0, sv(0));
  Eigen::VectorXd unit_id = coords(basis, identity(d)) / std::sqrt(static_cast<double>(d));

  Eigen::MatrixXd kept(m, 0);
  for (Eigen::Index a = 0; a < m; ++a) {
    if (sv(a) > cutoff) continue;
    Eigen::VectorXd v = svd.matrixV().col(a);
    v -= unit_id.dot(v) * unit_id;
    for (Eigen::Index c = 0; c < kept.cols(); ++c) v -= kept.col(c).dot(v) * kept.col(c);
    const double n = v.norm();
    if (n < 0.5) continue;
    kept.conservativeResize(Eigen::NoChange, kept.cols() + 1);
    kept.col(kept.cols() - 1) = v / n;
  }
  std::vector<Matrix> out;
  for (Eigen::Index c = 0; c < kept.cols(); ++c) out.push_back(from_coords(basis, kept.col(c)));
  return out;
}

// Affine rescaling of a Hermitian X onto an effect with spectrum spanning [0, 1].
std::optional<Matrix> to_effect(const Matrix& x) {
  const RealVector ev = hermitian_eigenvalues(x);
  const double span = ev.maxCoeff() - ev.minCoeff();
  if (!(span > 1e-9)) return std::nullopt;
  return hermitian_part((x - ev.minCoeff() * identity(x.rows())) / span);
}

// Half the candidates are unstructured; the other half leave a recurrent
// subspace of dim >= 2 invariant and let its complement decay into it.
KrausInstrument candidate_instrument(Rng& rng, Eigen::Index d) {
  const std::size_t outcomes = 2 + rng.index(2);
  if (rng.uniform() < 0.5) return random_instrument(rng, d, outcomes, 1 + rng.index(2));

  const Eigen::Index rec = 2 + static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(d - 2)));
  const Eigen::Index tra = d - rec;
  const double gamma = rng.uniform(0.2, 1.0);
  const Matrix basis = haar_unitary(rng, d);
  const Matrix w = haar_unitary(rng, tra);

  std::vector<Matrix> kraus;
  Matrix k0 = Matrix::Zero(d, d);
  k0.topLeftCorner(rec, rec) = identity(rec);
  k0.bottomRightCorner(tra, tra) = std::sqrt(1.0 - gamma) * w;
  kraus.push_back(k0);
  for (Eigen::Index t = 0; t < tra; ++t) {
    const RealVector p = random_simplex(rng, static_cast<std::size_t>(rec));
    for (Eigen::Index r = 0; r < rec; ++r) {
      Matrix k = Matrix::Zero(d, d);
      k(r, rec + t) = std::sqrt(gamma * p(r));
      kraus.push_back(k);
    }
  }
  // Random grouping; the first `outcomes` operators seed distinct outcomes.
  std::vector<std::vector<Matrix>> families(std::min(outcomes, kraus.size()));
  for (std::size_t i = 0; i < kraus.size(); ++i) {
    const std::size_t j = i < families.size() ? i : rng.index(families.size());
    families[j].push_back(basis * kraus[i] * basis.adjoint());
  }
  return KrausInstrument(std::move(families));
}

struct Candidate {
  std::optional<HWWitness> best;
  std::size_t evaluations = 0;
};

double d1_key(double d1, const HWSearchOptions& opts) { return d1 <= opts.d1_target ? 0.0 : d1; }

// Lexicographic (d1, -d2) with d1 values at or below target treated as equal.
bool better(const HWWitness& a, const HWWitness& b, const HWSearchOptions& opts) {
  const double ka = d1_key(a.d1, opts);
  const double kb = d1_key(b.d1, opts);
  if (ka != kb) return ka < kb;
  if (a.d2 != b.d2) return a.d2 > b.d2;
  return a.restart < b.restart;
}

Candidate run_restart(Eigen::Index dim, std::uint64_t seed, std::size_t budget,
                      std::size_t restart, const HWSearchOptions& opts) {
  Rng rng(derive_seed(seed, restart));
  Candidate out;
  // One evaluation; keeps the restart's best witness and returns d2.
  auto evaluate = [&](const KrausInstrument& instr, const Matrix& s) {
    ++out.evaluations;
    HWWitness w{instr, Effect::unchecked(s), nsc_deviation(instr, s),
                nsc_deviation(instr, Matrix(s * s)), 0, restart};
    const double d2 = w.d2;
    if (!out.best || better(w, *out.best, opts)) out.best = std::move(w);
    return d2;
  };
  auto found = [&] {
    return out.best && out.best->d1 <= opts.d1_target && out.best->d2 >= opts.d2_target;
  };

  while (out.evaluations < budget && !found()) {
    const KrausInstrument instr = candidate_instrument(rng, dim);
    const auto fixed = fixed_points(instr);
    if (fixed.empty()) {
      evaluate(instr, random_effect(rng, dim).matrix());
      continue;
    }
    Eigen::VectorXd c(static_cast<Eigen::Index>(fixed.size()));
    for (Eigen::Index i = 0; i < c.size(); ++i) c(i) = rng.normal();
    auto effect_of = [&](const Eigen::VectorXd& coef) {
      Matrix x = Matrix::Zero(dim, dim);
      for (std::size_t i = 0; i < fixed.size(); ++i) x += coef(static_cast<Eigen::Index>(i)) * fixed[i];
      return to_effect(x);
    };
    auto s = effect_of(c);
    if (!s) continue;
    double score = evaluate(instr, *s);
    double step = 0.5;
    for (std::size_t it = 0; it < opts.refine_steps && out.evaluations < budget; ++it) {
      const Eigen::Index i = static_cast<Eigen::Index>(rng.index(fixed.size()));
      Eigen::VectorXd trial = c;
      trial(i) += (rng.uniform() < 0.5 ? -step : step);
      const auto st = effect_of(trial);
      if (!st) continue;
      const double d2 = evaluate(instr, *st);
      if (d2 > score) {
        c = trial;
        score = d2;
      } else {
        step *= 0.9;
      }
    }
  }
  if (out.best) out.best->evaluations = out.evaluations;
  return out;
}

}  // namespace

bool accept_witness(const KrausInstrument& instr, const Effect& s, const HWSearchOptions& opts) {
  const Matrix& m = s.matrix();
  return nsc_deviation(instr, m) <= opts.d1_target &&
         nsc_deviation(instr, Matrix(m * m)) >= opts.d2_target;
}

std::optional<HWWitness> heinosaari_wolf_search(Eigen::Index dim, std::uint64_t seed,
                                                std::size_t budget, const HWSearchOptions& opts) {
  if (budget == 0 || dim < 3) return std::nullopt;
  const std::size_t restarts = std::max<std::size_t>(1, std::min(opts.restarts, budget));
  std::vector<Candidate> results(restarts);
  auto work = [&](std::size_t r) {
    const std::size_t share = budget / restarts + (r < budget % restarts ? 1 : 0);
    results[r] = run_restart(dim, seed, share, r, opts);
  };
  const unsigned threads = std::max(1u, std::min<unsigned>(opts.threads, static_cast<unsigned>(restarts)));
  if (threads == 1) {
    for (std::size_t r = 0; r < restarts; ++r) work(r);
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        for (std::size_t r = t; r < restarts; r += threads) work(r);
      });
    }
    for (auto& th : pool) th.join();
  }

  std::optional<HWWitness> best;
  std::size_t total = 0;
  for (auto& c : results) {
    total += c.evaluations;
    if (c.best && (!best || better(*c.best, *best, opts))) best = c.best;
  }
  if (!best || !accept_witness(best->instrument, best->effect, opts)) return std::nullopt;
  best->evaluations = total;
  return best;
}

}  // namespace relloc
