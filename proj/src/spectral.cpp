#include "zeno/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace zeno {

namespace {

std::string label(std::string_view what) { return std::string(what); }

}  // namespace

void require_finite(const ComplexMatrix& a, std::string_view what) {
  if (!a.allFinite()) throw ValidationError(label(what) + ": non-finite entry");
}

SpectralOperator::SpectralOperator(RealVector eigenvalues, ComplexMatrix eigenvectors)
    : eigenvalues_(std::move(eigenvalues)), eigenvectors_(std::move(eigenvectors)) {
  const Index n = eigenvalues_.size();
  if (n == 0) throw ValidationError("SpectralOperator: empty spectrum");
  if (eigenvectors_.rows() != n || eigenvectors_.cols() != n)
    throw ValidationError("SpectralOperator: eigenvector matrix must be dim x dim");
  if (!eigenvalues_.allFinite()) throw ValidationError("SpectralOperator: non-finite eigenvalue");
  require_finite(eigenvectors_, "SpectralOperator eigenvectors");
  for (Index i = 1; i < n; ++i) {
    if (eigenvalues_(i) < eigenvalues_(i - 1))
      throw ValidationError("SpectralOperator: eigenvalues must be ascending");
  }
  if (unitarity_defect(eigenvectors_) > kUnitarityTolerance)
    throw ValidationError("SpectralOperator: eigenvector matrix is not unitary");
}

double SpectralOperator::clamp_scale() const { return std::max(1.0, max_eigenvalue()); }

bool SpectralOperator::non_negative() const {
  return min_eigenvalue() >= -kClampWindow * clamp_scale();
}

RealVector SpectralOperator::clamped_eigenvalues() const {
  if (!non_negative())
    throw ValidationError("operator has an eigenvalue below the clamping window (not non-negative)");
  return eigenvalues_.cwiseMax(0.0);
}

ComplexMatrix SpectralOperator::dense() const {
  return eigenvectors_ * eigenvalues_.cast<Complex>().asDiagonal() * eigenvectors_.adjoint();
}

SubspaceProjection::SubspaceProjection(ComplexMatrix isometry) : isometry_(std::move(isometry)) {
  if (rank() < 1 || rank() > ambient_dim())
    throw ValidationError("SubspaceProjection: need 1 <= rank <= ambient_dim");
  require_finite(isometry_, "SubspaceProjection isometry");
  if (unitarity_defect(isometry_) > kUnitarityTolerance)
    throw ValidationError("SubspaceProjection: columns are not orthonormal");
}

SpectralOperator hermitian_eig(const ComplexMatrix& a, double tol) {
  if (a.rows() != a.cols()) throw ValidationError("hermitian_eig: matrix is not square");
  if (a.rows() == 0) throw ValidationError("hermitian_eig: empty matrix");
  require_finite(a, "hermitian_eig input");

  const double scale = operator_norm(a);
  if (operator_norm(a - a.adjoint()) > tol * scale)
    throw ValidationError("hermitian_eig: matrix is not Hermitian within tolerance");

  const ComplexMatrix sym = (a + a.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym);
  if (solver.info() != Eigen::Success)
    throw NumericalGuardError("hermitian_eig: eigensolver did not converge");

  SpectralOperator op(solver.eigenvalues(), solver.eigenvectors());
  const double residual = operator_norm(op.dense() - sym);
  if (residual > kReconstructionTolerance * std::max(1.0, scale))
    throw NumericalGuardError("hermitian_eig: reconstruction residual " + std::to_string(residual));
  return op;
}

ComplexMatrix apply_function_compressed(const SpectralOperator& op, const ScalarFunction& f,
                                        const ComplexMatrix& eigen_isometry) {
  if (eigen_isometry.rows() != op.dim())
    throw ValidationError("apply_function: dimension mismatch");
  ComplexVector values(op.dim());
  bool real_valued = true;
  for (Index i = 0; i < op.dim(); ++i) {
    const Complex v = f(op.eigenvalues()(i));
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      throw ValidationError("apply_function: function is not finite at eigenvalue " +
                            std::to_string(op.eigenvalues()(i)));
    values(i) = v;
    real_valued = real_valued && v.imag() == 0.0;
  }
  ComplexMatrix result = eigen_isometry.adjoint() * values.asDiagonal() * eigen_isometry;
  if (real_valued) result = (result + result.adjoint()).eval() / 2.0;
  return result;
}

ComplexMatrix apply_function(const SpectralOperator& op, const ScalarFunction& f) {
  // U f(Λ) U* is the compressed form with W = U*.
  return apply_function_compressed(op, f, op.eigenvectors().adjoint());
}

double operator_norm(const ComplexMatrix& a) {
  if (a.size() == 0) return 0.0;
  require_finite(a, "operator_norm input");
  Eigen::BDCSVD<ComplexMatrix> svd(a);
  return svd.singularValues()(0);
}

ComplexMatrix sqrt_psd(const SpectralOperator& op) {
  const RealVector roots = op.clamped_eigenvalues().cwiseSqrt();
  ComplexMatrix result =
      op.eigenvectors() * roots.cast<Complex>().asDiagonal() * op.eigenvectors().adjoint();
  return (result + result.adjoint()).eval() / 2.0;
}

double unitarity_defect(const ComplexMatrix& a) {
  const ComplexMatrix gram = a.adjoint() * a;
  return operator_norm(gram - ComplexMatrix::Identity(gram.rows(), gram.cols()));
}

ComplexMatrix guarded_inverse(const ComplexMatrix& a, std::string_view what, double max_condition) {
  if (a.rows() != a.cols()) throw ValidationError(label(what) + ": matrix is not square");
  require_finite(a, what);
  Eigen::JacobiSVD<ComplexMatrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RealVector& s = svd.singularValues();
  const double smin = s(s.size() - 1);
  if (smin == 0.0 || s(0) / smin > max_condition)
    throw NumericalGuardError(label(what) + ": condition number exceeds guard");
  return svd.matrixV() * s.cwiseInverse().cast<Complex>().asDiagonal() * svd.matrixU().adjoint();
}

}  // namespace zeno
