#pragma once

// Seeded generators for test instances. The bit stream is a counter-based
// splitmix64, so an instance depends only on (seed, draw index) and not on
// the platform's <random> distributions.

#include <cstdint>

#include "relloc/measurement.hpp"

namespace relloc {

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Sub-seed for scenario `index`, repeat `repeat` under `master`.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index, std::uint64_t repeat = 0);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t next_u64() { return mix64(seed_ + 0x9e3779b97f4a7c15ULL * ++counter_); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n).
  std::size_t index(std::size_t n);
  /// Standard normal (Box-Muller).
  double normal();
  /// Complex Gaussian with E|z|^2 = 1.
  Complex complex_normal();

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

Matrix ginibre(Rng& rng, Eigen::Index rows, Eigen::Index cols);

/// Haar-distributed unitary: QR of a Ginibre matrix with R's diagonal phases
/// absorbed into Q.
Matrix haar_unitary(Rng& rng, Eigen::Index dim);

/// Hilbert-Schmidt random mixed state of the given rank (0 = full rank).
DensityState random_state(Rng& rng, Eigen::Index dim, Eigen::Index rank = 0);
DensityState random_pure_state(Rng& rng, Eigen::Index dim);

/// U diag(lambda) U^dagger with Haar U and lambda uniform on [0, 1].
Effect random_effect(Rng& rng, Eigen::Index dim);

/// Effects M^{-1/2} X_j X_j^dagger M^{-1/2} with Ginibre X_j, M = sum_j X_j X_j^dagger.
DiscretePOVM random_povm(Rng& rng, Eigen::Index dim, std::size_t outcomes);

/// Instrument whose stacked Kraus operators form the first `dim` columns of a
/// Haar unitary.
KrausInstrument random_instrument(Rng& rng, Eigen::Index dim, std::size_t outcomes,
                                  std::size_t kraus_per_outcome);

/// Random probability vector (flat Dirichlet).
RealVector random_simplex(Rng& rng, std::size_t n);

struct PovmPair {
  DiscretePOVM first;
  DiscretePOVM second;
};

/// Two POVMs diagonal in a common Haar-random basis with independent random
/// eigenvalue profiles.
PovmPair commuting_pair(Rng& rng, Eigen::Index dim, std::size_t outcomes_first,
                        std::size_t outcomes_second);

struct InstrumentEffect {
  KrausInstrument instrument;
  Effect effect;
};

/// Instrument and effect that are all diagonal in one Haar-random basis, with
/// random phases on the Kraus eigenvalues (so the Kraus operators are normal
/// but not Hermitian). Every Kraus operator commutes with the effect.
InstrumentEffect commuting_instrument(Rng& rng, Eigen::Index dim, std::size_t outcomes,
                                      std::size_t kraus_per_outcome);

}  // namespace relloc
