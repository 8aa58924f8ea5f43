// Dense complex linear algebra kernel: Hermitian eigendecomposition, spectral
// functional calculus, operator norms and PSD square roots.
//
// Every operator the lab manipulates is a small dense complex matrix. Hermitian
// operators are kept in spectral form (eigenvalues + unitary eigenbasis) so that
// f(A) = U f(Λ) U* is exact up to the eigendecomposition error.

#pragma once

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <stdexcept>
#include <string_view>

namespace zeno {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;
using ScalarFunction = std::function<Complex(double)>;

// Bad input or violated precondition.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numerical guard tripped: eigensolver failure, reconstruction drift, or a
// conditioning limit exceeded.
class NumericalGuardError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kHermitianTolerance = 1e-8;
inline constexpr double kReconstructionTolerance = 1e-10;
inline constexpr double kUnitarityTolerance = 1e-10;
inline constexpr double kClampWindow = 1e-10;

// Hermitian operator stored as ascending real eigenvalues and a unitary matrix
// whose columns are the corresponding eigenvectors.
class SpectralOperator {
 public:
  SpectralOperator(RealVector eigenvalues, ComplexMatrix eigenvectors);

  Index dim() const { return eigenvalues_.size(); }
  const RealVector& eigenvalues() const { return eigenvalues_; }
  const ComplexMatrix& eigenvectors() const { return eigenvectors_; }

  double min_eigenvalue() const { return eigenvalues_(0); }
  double max_eigenvalue() const { return eigenvalues_(dim() - 1); }

  // max(1, λ_max), the scale of the clamping window.
  double clamp_scale() const;

  // min eigenvalue ≥ −1e-10·max(1, λ_max).
  bool non_negative() const;

  // Eigenvalues with the clamping window applied (requires non_negative()).
  RealVector clamped_eigenvalues() const;

  ComplexMatrix dense() const;

 private:
  RealVector eigenvalues_;
  ComplexMatrix eigenvectors_;
};

// Isometry V onto a closed subspace h; P = V V*.
class SubspaceProjection {
 public:
  explicit SubspaceProjection(ComplexMatrix isometry);

  Index ambient_dim() const { return isometry_.rows(); }
  Index rank() const { return isometry_.cols(); }
  const ComplexMatrix& isometry() const { return isometry_; }
  ComplexMatrix projector() const { return isometry_ * isometry_.adjoint(); }

 private:
  ComplexMatrix isometry_;
};

SpectralOperator hermitian_eig(const ComplexMatrix& a, double tol = kHermitianTolerance);

// U diag(f(λ_i)) U*. Throws ValidationError if f is non-finite at an eigenvalue.
ComplexMatrix apply_function(const SpectralOperator& op, const ScalarFunction& f);

// W* diag(f(λ_i)) W for a matrix W expressed in the eigenbasis (W = U* V).
ComplexMatrix apply_function_compressed(const SpectralOperator& op, const ScalarFunction& f,
                                        const ComplexMatrix& eigen_isometry);

// Largest singular value.
double operator_norm(const ComplexMatrix& a);

ComplexMatrix sqrt_psd(const SpectralOperator& op);

// ‖A*A − I‖.
double unitarity_defect(const ComplexMatrix& a);

// Throws ValidationError on NaN/Inf entries.
void require_finite(const ComplexMatrix& a, std::string_view what);

// Inverse guarded by the 2-norm condition number; trips NumericalGuardError
// beyond max_condition.
ComplexMatrix guarded_inverse(const ComplexMatrix& a, std::string_view what,
                              double max_condition = 1e12);

}  // namespace zeno
