#pragma once

// Dense complex matrix helpers. Every PSD functional calculus (square root,
// inverse square root, exponentials of Hermitian generators) goes through
// `spectral_apply`, so there is one numerical kernel to validate.

#include <complex>
#include <functional>

#include <Eigen/Dense>

namespace relloc {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kDefaultTol = 1e-10;
inline constexpr double kProbFloor = 1e-12;

struct Spectrum {
  RealVector values;  // ascending
  Matrix vectors;     // columns are eigenvectors
};

/// Eigendecomposition of the Hermitian part of `m`.
Spectrum hermitian_eig(const Matrix& m);
RealVector hermitian_eigenvalues(const Matrix& m);

/// V f(Lambda) V^dagger over the Hermitian part of `m`.
Matrix spectral_apply(const Matrix& m, const std::function<Complex(double)>& f);

double min_eigenvalue(const Matrix& m);
double max_eigenvalue(const Matrix& m);

/// Largest singular value.
double op_norm(const Matrix& m);
/// Sum of singular values.
double trace_norm(const Matrix& m);

/// ||m - m^dagger||_op.
double hermiticity_residual(const Matrix& m);
Matrix hermitian_part(const Matrix& m);
Matrix commutator(const Matrix& a, const Matrix& b);
Matrix identity(Eigen::Index dim);

/// Square root of a PSD matrix; negative eigenvalues are clamped to zero.
/// Throws std::invalid_argument if `m` is not Hermitian within
/// tol * max(1, ||m||).
Matrix psd_sqrt(const Matrix& m, double tol = kDefaultTol);

/// Inverse square root of a positive definite matrix. Throws
/// std::domain_error if the smallest eigenvalue is not above `floor`.
Matrix psd_inv_sqrt(const Matrix& m, double floor);

/// exp(-i t h) for Hermitian h.
Matrix unitary_evolution(const Matrix& h, double t);

/// ||u^dagger u - I||_op.
double unitarity_residual(const Matrix& u);

bool is_square(const Matrix& m);

}  // namespace relloc
