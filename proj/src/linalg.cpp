#include "relloc/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace relloc {

Spectrum hermitian_eig(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian_part(m));
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

RealVector hermitian_eigenvalues(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitian_part(m), Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
  return solver.eigenvalues();
}

Matrix spectral_apply(const Matrix& m, const std::function<Complex(double)>& f) {
  const Spectrum s = hermitian_eig(m);
  Vector fv(s.values.size());
  for (Eigen::Index i = 0; i < s.values.size(); ++i) fv(i) = f(s.values(i));
  return s.vectors * fv.asDiagonal() * s.vectors.adjoint();
}

double min_eigenvalue(const Matrix& m) { return hermitian_eigenvalues(m).minCoeff(); }

double max_eigenvalue(const Matrix& m) { return hermitian_eigenvalues(m).maxCoeff(); }

namespace {

// Exact (anti-)Hermitian structure lets the cheaper Hermitian solver stand in
// for the SVD: singular values are then |eigenvalues|.
enum class Symmetry { Hermitian, AntiHermitian, General };

Symmetry symmetry_of(const Matrix& m) {
  if (m.rows() != m.cols()) return Symmetry::General;
  const double scale = m.cwiseAbs().maxCoeff();
  const double tiny = 1e-15 * scale;
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() <= tiny) return Symmetry::Hermitian;
  if ((m + m.adjoint()).cwiseAbs().maxCoeff() <= tiny) return Symmetry::AntiHermitian;
  return Symmetry::General;
}

RealVector singular_values(const Matrix& m) {
  switch (symmetry_of(m)) {
    case Symmetry::Hermitian:
      return hermitian_eigenvalues(m).cwiseAbs();
    case Symmetry::AntiHermitian:
      return hermitian_eigenvalues(Complex(0.0, 1.0) * m).cwiseAbs();
    case Symmetry::General:
      break;
  }
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues();
}

}  // namespace

double op_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return singular_values(m).maxCoeff();
}

double trace_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  return singular_values(m).sum();
}

double hermiticity_residual(const Matrix& m) { return op_norm(m - m.adjoint()); }

Matrix hermitian_part(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }

Matrix identity(Eigen::Index dim) { return Matrix::Identity(dim, dim); }

Matrix psd_sqrt(const Matrix& m, double tol) {
  if (!is_square(m)) throw std::invalid_argument("psd_sqrt: matrix is not square");
  const double scale = std::max(1.0, op_norm(m));
  if (hermiticity_residual(m) > tol * scale) {
    throw std::invalid_argument("psd_sqrt: matrix is not Hermitian");
  }
  return spectral_apply(m, [](double x) { return Complex(std::sqrt(std::max(x, 0.0)), 0.0); });
}

Matrix psd_inv_sqrt(const Matrix& m, double floor) {
  const Spectrum s = hermitian_eig(m);
  if (!(s.values.minCoeff() > floor)) {
    throw std::domain_error("psd_inv_sqrt: smallest eigenvalue " +
                            std::to_string(s.values.minCoeff()) + " is not above " +
                            std::to_string(floor));
  }
  Vector fv(s.values.size());
  for (Eigen::Index i = 0; i < s.values.size(); ++i) fv(i) = 1.0 / std::sqrt(s.values(i));
  return s.vectors * fv.asDiagonal() * s.vectors.adjoint();
}

Matrix unitary_evolution(const Matrix& h, double t) {
  return spectral_apply(h, [t](double e) { return std::exp(Complex(0.0, -t * e)); });
}

double unitarity_residual(const Matrix& u) {
  return op_norm(u.adjoint() * u - identity(u.rows()));
}

bool is_square(const Matrix& m) { return m.rows() == m.cols() && m.rows() > 0; }

}  // namespace relloc
