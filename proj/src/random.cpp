#include "relloc/random.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace relloc {

std::uint64_t mix64(std::uint64_t x) {
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index, std::uint64_t repeat) {
  return mix64(mix64(mix64(master) ^ (index + 0x632be59bd9b4e019ULL)) ^
               (repeat + 0x8cb92ba72f3d8dd7ULL));
}

std::size_t Rng::index(std::size_t n) {
  if (n == 0) throw std::invalid_argument("Rng::index: empty range");
  return static_cast<std::size_t>(uniform() * static_cast<double>(n)) % n;
}

double Rng::normal() {
  // 1 - u keeps the logarithm finite.
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

Complex Rng::complex_normal() {
  const double re = normal();
  const double im = normal();
  return Complex(re, im) / std::numbers::sqrt2;
}

Matrix ginibre(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  Matrix g(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) g(i, j) = rng.complex_normal();
  }
  return g;
}

Matrix haar_unitary(Rng& rng, Eigen::Index dim) {
  const Matrix g = ginibre(rng, dim, dim);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * identity(dim);
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < dim; ++j) {
    const double mag = std::abs(r(j, j));
    if (mag > 0.0) q.col(j) *= r(j, j) / mag;
  }
  return q;
}

DensityState random_state(Rng& rng, Eigen::Index dim, Eigen::Index rank) {
  if (rank <= 0 || rank > dim) rank = dim;
  const Matrix g = ginibre(rng, dim, rank);
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return DensityState::unchecked(hermitian_part(rho));
}

DensityState random_pure_state(Rng& rng, Eigen::Index dim) {
  Vector psi(dim);
  for (Eigen::Index i = 0; i < dim; ++i) psi(i) = rng.complex_normal();
  return DensityState::pure(psi);
}

Effect random_effect(Rng& rng, Eigen::Index dim) {
  const Matrix u = haar_unitary(rng, dim);
  RealVector lambda(dim);
  for (Eigen::Index i = 0; i < dim; ++i) lambda(i) = rng.uniform();
  return Effect::unchecked(hermitian_part(u * lambda.cast<Complex>().asDiagonal() * u.adjoint()));
}

DiscretePOVM random_povm(Rng& rng, Eigen::Index dim, std::size_t outcomes) {
  if (outcomes == 0) throw std::invalid_argument("random_povm: no outcomes");
  std::vector<Matrix> g;
  Matrix m = Matrix::Zero(dim, dim);
  for (std::size_t j = 0; j < outcomes; ++j) {
    const Matrix x = ginibre(rng, dim, dim);
    g.push_back(x * x.adjoint());
    m += g.back();
  }
  const Matrix w = psd_inv_sqrt(m, 0.0);
  std::vector<Effect> effects;
  for (const auto& gj : g) effects.push_back(Effect::unchecked(hermitian_part(w * gj * w)));
  return DiscretePOVM::unchecked(std::move(effects));
}

KrausInstrument random_instrument(Rng& rng, Eigen::Index dim, std::size_t outcomes,
                                  std::size_t kraus_per_outcome) {
  if (outcomes == 0 || kraus_per_outcome == 0) {
    throw std::invalid_argument("random_instrument: empty instrument");
  }
  const auto total = static_cast<Eigen::Index>(outcomes * kraus_per_outcome);
  const Matrix u = haar_unitary(rng, total * dim);
  std::vector<std::vector<Matrix>> families(outcomes);
  Eigen::Index block = 0;
  for (auto& fam : families) {
    for (std::size_t k = 0; k < kraus_per_outcome; ++k, ++block) {
      fam.push_back(u.block(block * dim, 0, dim, dim));
    }
  }
  return KrausInstrument(std::move(families));
}

RealVector random_simplex(Rng& rng, std::size_t n) {
  RealVector p(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < p.size(); ++i) p(i) = -std::log(1.0 - rng.uniform());
  return p / p.sum();
}

namespace {

// Column i of `profile` is the outcome distribution on basis vector i.
DiscretePOVM diagonal_povm(const Matrix& u, const Eigen::MatrixXd& profile) {
  std::vector<Effect> effects;
  for (Eigen::Index j = 0; j < profile.rows(); ++j) {
    const RealVector diag = profile.row(j).transpose();
    effects.push_back(Effect::unchecked(
        hermitian_part(u * diag.cast<Complex>().asDiagonal() * u.adjoint())));
  }
  return DiscretePOVM::unchecked(std::move(effects));
}

Eigen::MatrixXd random_profile(Rng& rng, Eigen::Index dim, std::size_t outcomes) {
  Eigen::MatrixXd profile(static_cast<Eigen::Index>(outcomes), dim);
  for (Eigen::Index i = 0; i < dim; ++i) profile.col(i) = random_simplex(rng, outcomes);
  return profile;
}

}  // namespace

PovmPair commuting_pair(Rng& rng, Eigen::Index dim, std::size_t outcomes_first,
                        std::size_t outcomes_second) {
  const Matrix u = haar_unitary(rng, dim);
  const auto pf = random_profile(rng, dim, outcomes_first);
  const auto ps = random_profile(rng, dim, outcomes_second);
  return {diagonal_povm(u, pf), diagonal_povm(u, ps)};
}

InstrumentEffect commuting_instrument(Rng& rng, Eigen::Index dim, std::size_t outcomes,
                                      std::size_t kraus_per_outcome) {
  const Matrix u = haar_unitary(rng, dim);
  const std::size_t total = outcomes * kraus_per_outcome;
  const auto weights = random_profile(rng, dim, total);
  std::vector<std::vector<Matrix>> families(outcomes);
  for (std::size_t j = 0; j < outcomes; ++j) {
    for (std::size_t k = 0; k < kraus_per_outcome; ++k) {
      Vector d(dim);
      for (Eigen::Index i = 0; i < dim; ++i) {
        const double phase = 2.0 * std::numbers::pi * rng.uniform();
        d(i) = std::sqrt(weights(static_cast<Eigen::Index>(j * kraus_per_outcome + k), i)) *
               std::polar(1.0, phase);
      }
      families[j].push_back(u * d.asDiagonal() * u.adjoint());
    }
  }
  RealVector s(dim);
  for (Eigen::Index i = 0; i < dim; ++i) s(i) = rng.uniform();
  Effect effect = Effect::unchecked(hermitian_part(u * s.cast<Complex>().asDiagonal() * u.adjoint()));
  return {KrausInstrument(std::move(families)), std::move(effect)};
}

}  // namespace relloc
