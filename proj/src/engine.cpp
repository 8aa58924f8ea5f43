#include "zeno/engine.hpp"

#include "zeno/format.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace zeno {

namespace {

constexpr Complex kI{0.0, 1.0};
constexpr double kCommutingTolerance = 1e-10;
constexpr double kUnitNormTolerance = 1e-12;

void require_non_negative(const ZenoModel& model, std::string_view what) {
  if (!model.flags().non_negative)
    throw ValidationError(std::string(what) + ": model " + model.id() + " is not non-negative");
}

void require_positive_tau(double tau, std::string_view what) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw ValidationError(std::string(what) + ": tau must be > 0");
}

// W* diag(values) W.
ComplexMatrix compress(const ComplexMatrix& w, const RealVector& values) {
  ComplexMatrix r = w.adjoint() * values.cast<Complex>().asDiagonal() * w;
  return (r + r.adjoint()).eval() / 2.0;
}

// Products are formed in extended precision: binary powering multiplies a
// norm excess of δ in the factor by n, and 1e-15 at n = 4096 is visible.
using WideComplex = std::complex<long double>;
using WideMatrix = Eigen::Matrix<WideComplex, Eigen::Dynamic, Eigen::Dynamic>;

// Nearest isometry to U*V by Newton-Schulz, X ← X(3I − X*X)/2.
WideMatrix wide_isometry(const ZenoModel& model) {
  WideMatrix x = model.eigen_isometry().cast<WideComplex>();
  const WideMatrix three = WideMatrix::Identity(x.cols(), x.cols()) * WideComplex(3.0L);
  for (int k = 0; k < 3; ++k) x = (x * (three - x.adjoint() * x)) * WideComplex(0.5L);
  return x;
}

// V*φ(τH)V with |φ| clamped to the unit disc.
WideMatrix wide_step(const ZenoModel& model, const WideMatrix& w, const FunctionSpec& spec, double tau) {
  const RealVector& lambda = model.hamiltonian().eigenvalues();
  Eigen::Matrix<WideComplex, Eigen::Dynamic, 1> values(lambda.size());
  for (Index i = 0; i < lambda.size(); ++i) {
    const Complex z = spec(tau * lambda(i));
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
      throw NumericalGuardError("zeno step: " + spec.id + " is not finite at " + format_double(tau * lambda(i)));
    WideComplex v(z.real(), z.imag());
    const long double modulus = std::abs(v);
    if (modulus > 1.0L) v /= modulus;
    values(i) = v;
  }
  return w.adjoint() * values.asDiagonal() * w;
}

WideMatrix wide_power(const WideMatrix& a, std::uint64_t n) {
  WideMatrix result = WideMatrix::Identity(a.rows(), a.cols());
  WideMatrix base = a;
  while (n > 0) {
    if (n & 1U) result = result * base;
    n >>= 1U;
    if (n > 0) base = base * base;
  }
  return result;
}

ComplexMatrix narrow(const WideMatrix& a) {
  return a.unaryExpr([](const WideComplex& z) {
    return Complex(static_cast<double>(z.real()), static_cast<double>(z.imag()));
  });
}

ComplexMatrix step_matrix(const ZenoModel& model, const FunctionSpec& spec, double tau) {
  return narrow(wide_step(model, wide_isometry(model), spec, tau));
}

ComplexMatrix identity(Index n) { return ComplexMatrix::Identity(n, n); }

// Precomputed e^{−itK} factory.
class TargetEvolution {
 public:
  explicit TargetEvolution(const ZenoModel& model) : generator_(hermitian_eig(zeno_generator(model))) {}
  ComplexMatrix at(double t) const {
    return apply_function(generator_, [t](double x) { return std::exp(Complex(0.0, -t * x)); });
  }

 private:
  SpectralOperator generator_;
};

void require_unit_columns(const ComplexMatrix& vectors, Index rows, std::string_view what) {
  if (vectors.rows() != rows) throw ValidationError(std::string(what) + ": test vector dimension mismatch");
  for (Index j = 0; j < vectors.cols(); ++j) {
    if (std::abs(vectors.col(j).norm() - 1.0) > kUnitNormTolerance)
      throw ValidationError(std::string(what) + ": test vectors must be unit-normalized");
  }
}

}  // namespace

// ---------------------------------------------------------------- model

ZenoModel::ZenoModel(std::string id, SpectralOperator hamiltonian, SubspaceProjection subspace,
                     bool commuting, bool out_of_assumption, std::optional<CircleChart> chart)
    : id_(std::move(id)),
      hamiltonian_(std::move(hamiltonian)),
      subspace_(std::move(subspace)),
      chart_(chart) {
  if (hamiltonian_.dim() != subspace_.ambient_dim())
    throw ValidationError("ZenoModel: ambient dimensions of H and V differ");
  flags_.non_negative = hamiltonian_.non_negative();
  flags_.commuting = commuting;
  flags_.out_of_assumption = out_of_assumption;
  eigen_isometry_ = hamiltonian_.eigenvectors().adjoint() * subspace_.isometry();
  dense_hamiltonian_ = hamiltonian_.dense();
  if (commuting && commutator_norm() > kCommutingTolerance)
    throw ValidationError("ZenoModel: flagged commuting but ||PH - HP|| exceeds tolerance");
  if (out_of_assumption && flags_.non_negative)
    throw ValidationError("ZenoModel: out-of-assumption model must not be non-negative");
  if (chart_) {
    if (chart_->points != ambient_dim() || chart_->first < 0 || chart_->last >= chart_->points ||
        chart_->first > chart_->last)
      throw ValidationError("ZenoModel: circle chart inconsistent with model");
  }
}

double ZenoModel::commutator_norm() const {
  const ComplexMatrix p = subspace_.projector();
  return operator_norm(p * dense_hamiltonian_ - dense_hamiltonian_ * p);
}

// ---------------------------------------------------------------- generator, steps, products

ComplexMatrix zeno_generator(const ZenoModel& model) {
  require_non_negative(model, "zeno_generator");
  const ComplexMatrix t = sqrt_psd(model.hamiltonian()) * model.subspace().isometry();
  ComplexMatrix k = t.adjoint() * t;
  return (k + k.adjoint()).eval() / 2.0;
}

ComplexMatrix zeno_step(const ZenoModel& model, const FunctionSpec& spec, double tau) {
  require_positive_tau(tau, "zeno_step");
  return step_matrix(model, spec, tau);
}

ComplexMatrix defect_operator(const ZenoModel& model, const FunctionSpec& spec, double tau) {
  require_positive_tau(tau, "defect_operator");
  return (identity(model.rank()) - step_matrix(model, spec, tau)) / tau;
}

double factorization_residual(const ZenoModel& model, const FunctionSpec& spec, double tau) {
  require_positive_tau(tau, "factorization_residual");
  require_non_negative(model, "factorization_residual");
  const SpectralOperator& h = model.hamiltonian();
  const ComplexMatrix t = sqrt_psd(h) * model.subspace().isometry();
  const ComplexMatrix p = apply_function(h, [&](double x) { return p_function(spec, tau * std::max(x, 0.0)); });
  const ComplexMatrix lhs = identity(model.rank()) - step_matrix(model, spec, tau);
  return operator_norm(lhs - tau * (t.adjoint() * p * t));
}

ComplexMatrix matrix_power(const ComplexMatrix& a, std::uint64_t n) {
  if (a.rows() != a.cols()) throw ValidationError("matrix_power: matrix is not square");
  ComplexMatrix result = identity(a.rows());
  ComplexMatrix base = a;
  while (n > 0) {
    if (n & 1U) result = result * base;
    n >>= 1U;
    if (n > 0) base = base * base;
  }
  return result;
}

ComplexMatrix zeno_product(const ZenoModel& model, const FunctionSpec& spec, double t, std::uint64_t n) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw ValidationError("zeno_product: t must be >= 0");
  if (n < 1) throw ValidationError("zeno_product: n must be >= 1");
  const WideMatrix w = wide_isometry(model);
  return narrow(wide_power(wide_step(model, w, spec, t / static_cast<double>(n)), n));
}

ComplexMatrix zeno_target(const ZenoModel& model, double t) {
  if (!std::isfinite(t)) throw ValidationError("zeno_target: t must be finite");
  return TargetEvolution(model).at(t);
}

// ---------------------------------------------------------------- metrics

ComplexMatrix random_unit_vectors(Index dim, Index count, std::uint64_t seed) {
  if (dim < 1 || count < 0) throw ValidationError("random_unit_vectors: bad dimensions");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  ComplexMatrix out(dim, count);
  for (Index j = 0; j < count; ++j) {
    for (Index i = 0; i < dim; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      out(i, j) = Complex(re, im);
    }
    out.col(j).normalize();
  }
  return out;
}

ComplexMatrix standard_test_vectors(Index rank, std::uint64_t seed) {
  ComplexMatrix out(rank, rank + 8);
  out.leftCols(rank) = identity(rank);
  out.rightCols(8) = random_unit_vectors(rank, 8, seed);
  return out;
}

ErrorMetrics error_metrics(const ComplexMatrix& product, const ComplexMatrix& target,
                           const ComplexMatrix& test_vectors) {
  if (product.rows() != target.rows() || product.cols() != target.cols())
    throw ValidationError("error_metrics: product and target dimensions differ");
  require_unit_columns(test_vectors, product.cols(), "error_metrics");
  const ComplexMatrix diff = product - target;
  ErrorMetrics m;
  m.norm_error = operator_norm(diff);
  const ComplexMatrix applied = diff * test_vectors;
  for (Index j = 0; j < applied.cols(); ++j) m.strong_errors.push_back(applied.col(j).norm());
  return m;
}

double time_averaged_error(const ZenoModel& model, const FunctionSpec& spec, std::uint64_t n,
                           double t_max, std::size_t nodes, const ComplexMatrix& test_vectors) {
  if (nodes < 33 || nodes % 2 == 0) throw ValidationError("time_averaged_error: nodes must be odd and >= 33");
  if (!(t_max >= 0.0) || !std::isfinite(t_max)) throw ValidationError("time_averaged_error: T_max must be >= 0");
  if (n < 1) throw ValidationError("time_averaged_error: n must be >= 1");
  require_unit_columns(test_vectors, model.rank(), "time_averaged_error");
  if (t_max == 0.0 || test_vectors.cols() == 0) return 0.0;

  const TargetEvolution target(model);
  const double h = t_max / static_cast<double>(nodes - 1);
  double integral = 0.0;
  for (std::size_t k = 0; k < nodes; ++k) {
    const double t = h * static_cast<double>(k);
    const ComplexMatrix diff = zeno_product(model, spec, t, n) - target.at(t);
    const double mean_sq = (diff * test_vectors).colwise().squaredNorm().mean();
    const double weight = (k == 0 || k + 1 == nodes) ? 0.5 : 1.0;
    integral += weight * mean_sq;
  }
  return integral * h;
}

// ---------------------------------------------------------------- bound certification

ComplexMatrix regularity_generator(const ZenoModel& model, double alpha) {
  require_non_negative(model, "regularity_generator");
  if (!(alpha > 0.0)) throw ValidationError("regularity_generator: alpha must be > 0");
  return compress(model.eigen_isometry(),
                  model.hamiltonian().clamped_eigenvalues().array().pow(1.0 + alpha).matrix());
}

BoundCertificate certify_bound(const ZenoModel& model, const FunctionSpec& spec, double t,
                               std::uint64_t n, double alpha, std::span<const double> grid) {
  require_non_negative(model, "certify_bound");
  if (!(alpha > 0.0)) throw ValidationError("certify_bound: alpha must be > 0");
  if (!(t >= 0.0) || n < 1) throw ValidationError("certify_bound: need t >= 0 and n >= 1");

  const double tau = t / static_cast<double>(n);
  std::vector<double> spectral_points;
  for (double lambda : model.hamiltonian().clamped_eigenvalues()) spectral_points.push_back(tau * lambda);

  BoundCertificate c;
  c.c_p = p_sup(spec, grid, spectral_points);
  c.c_alpha = p_alpha_sup(spec, alpha, grid, spectral_points);
  c.lhs = operator_norm(zeno_product(model, spec, t, n) - zeno_target(model, t));
  const double k_norm = operator_norm(zeno_generator(model));
  const double k_alpha_norm = operator_norm(regularity_generator(model, alpha));
  c.chernoff_term = c.c_p * t * k_norm / std::sqrt(static_cast<double>(n));
  c.semigroup_term = t * std::pow(tau, alpha) * c.c_alpha * k_alpha_norm;
  c.rhs = c.chernoff_term + c.semigroup_term;
  c.pass = c.lhs <= c.rhs * (1.0 + 1e-10);
  return c;
}

// ---------------------------------------------------------------- proof-path diagnostics

ResidualSeries proof_path_diagnostics(const ZenoModel& model, const FunctionSpec& spec,
                                      std::span<const double> taus) {
  require_non_negative(model, "proof_path_diagnostics");
  if (spec.flags.im_nonpositive != Verdict::yes)
    throw ValidationError("proof_path_diagnostics: " + spec.id +
                          " is not verified to satisfy Im(phi) <= 0");
  const Decomposition d = kato_part_decompose(spec);
  const SpectralOperator& h = model.hamiltonian();
  const RealVector lambdas = h.clamped_eigenvalues();
  const ComplexMatrix& w = model.eigen_isometry();
  const Index r = model.rank();
  const ComplexMatrix id = identity(r);

  const ComplexMatrix k = zeno_generator(model);
  const ComplexMatrix generator_resolvent = guarded_inverse(id + k, "(I + K)");
  const ComplexMatrix rotated_resolvent = guarded_inverse(id + kI * k, "(I + iK)");

  ResidualSeries out;
  for (double tau : taus) {
    require_positive_tau(tau, "proof_path_diagnostics");
    RealVector omega_part(lambdas.size());
    RealVector psi_part(lambdas.size());
    for (Index i = 0; i < lambdas.size(); ++i) {
      const double x = tau * lambdas(i);
      omega_part(i) = d.omega(x) / tau;          // (1 − ϕ(x))/τ
      psi_part(i) = (1.0 - d.psi(x)) / tau;
    }
    const ComplexMatrix l0 = compress(w, omega_part);
    const ComplexMatrix q = compress(w, psi_part);
    const ComplexMatrix l = q + l0;

    const SpectralOperator shifted = hermitian_eig(id + l0);
    if (!(shifted.min_eigenvalue() > 0.0) || shifted.max_eigenvalue() / shifted.min_eigenvalue() > 1e12)
      throw NumericalGuardError("(I + L_0): condition number exceeds guard");
    const ComplexMatrix inv_sqrt = apply_function(shifted, [](double x) { return Complex(1.0 / std::sqrt(x), 0.0); });
    const ComplexMatrix m = inv_sqrt * q * inv_sqrt;
    const ComplexMatrix s = defect_operator(model, spec, tau);

    out[kKatoResolvent].push_back(
        operator_norm(guarded_inverse(id + l0, "(I + L_0)") - generator_resolvent));
    out[kFullResolvent].push_back(operator_norm(guarded_inverse(id + l, "(I + L)") - generator_resolvent));
    out[kNormalizedResolvent].push_back(operator_norm(guarded_inverse(id + m, "(I + M)") - id));
    out[kDefectResolvent].push_back(operator_norm(guarded_inverse(id + s, "(I + S)") - rotated_resolvent));
  }
  return out;
}

SandwichReport sandwich_check(const ZenoModel& model, const Decomposition& decomposition, double tau,
                              const ComplexMatrix& vectors, std::span<const double> grid) {
  require_positive_tau(tau, "sandwich_check");
  require_non_negative(model, "sandwich_check");
  if (vectors.rows() != model.rank()) throw ValidationError("sandwich_check: vector dimension mismatch");

  const RealVector lambdas = model.hamiltonian().clamped_eigenvalues();
  RealVector central_diag(lambdas.size());
  RealVector lower_diag(lambdas.size());
  RealVector upper_diag(lambdas.size());
  for (Index i = 0; i < lambdas.size(); ++i) {
    const double x = tau * lambdas(i);
    const PBounds pb = p_bounds(decomposition, x, grid);
    central_diag(i) = decomposition.omega(x) / tau;
    // √H p_±(τH) √H = H p_±(τH) in the eigenbasis.
    lower_diag(i) = lambdas(i) * pb.minus;
    upper_diag(i) = lambdas(i) * pb.plus;
  }
  const ComplexMatrix& w = model.eigen_isometry();
  const ComplexMatrix central = compress(w, central_diag);
  const ComplexMatrix lower = compress(w, lower_diag);
  const ComplexMatrix upper = compress(w, upper_diag);
  const ComplexMatrix k = zeno_generator(model);

  SandwichReport report;
  report.pass = true;
  auto form = [](const ComplexMatrix& a, const ComplexVector& f) { return f.dot(a * f).real(); };
  for (Index j = 0; j < vectors.cols(); ++j) {
    const ComplexVector f = vectors.col(j);
    report.lower_form.push_back(form(lower, f));
    report.central_form.push_back(form(central, f));
    report.upper_form.push_back(form(upper, f));
    report.generator_form.push_back(form(k, f));
    report.lower_margins.push_back(report.central_form.back() - report.lower_form.back());
    report.upper_margins.push_back(report.upper_form.back() - report.central_form.back());
    report.pass = report.pass && report.lower_margins.back() >= -kSandwichSlack &&
                  report.upper_margins.back() >= -kSandwichSlack;
  }
  return report;
}

double graf_guekos_residual(const ZenoModel& model, double t) {
  require_non_negative(model, "graf_guekos_residual");
  if (!(t > 0.0)) throw ValidationError("graf_guekos_residual: t must be > 0");
  const ComplexMatrix compressed = apply_function_compressed(
      model.hamiltonian(), [t](double x) { return std::exp(Complex(0.0, -t * x)); }, model.eigen_isometry());
  return operator_norm(compressed - zeno_target(model, t)) / t;
}

// ---------------------------------------------------------------- counterexample

ComplexMatrix unitary_evolution(const SpectralOperator& h, double s) {
  return apply_function(h, [s](double x) { return std::exp(Complex(0.0, -s * x)); });
}

CounterexampleReport counterexample_run(const ZenoModel& model, double t, std::uint64_t n,
                                        const ComplexMatrix& test_vectors) {
  if (!model.flags().out_of_assumption || !model.chart())
    throw ValidationError("counterexample_run: model " + model.id() + " is not an out-of-assumption circle model");
  if (!(t >= 0.0) || !std::isfinite(t) || n < 1) throw ValidationError("counterexample_run: need t >= 0 and n >= 1");
  require_unit_columns(test_vectors, model.rank(), "counterexample_run");
  const CircleChart& chart = *model.chart();
  if (chart.b() + t > chart.position(chart.points - 1))
    throw ValidationError("counterexample_run: translated window [a+t, b+t] wraps around the circle chart");

  auto compressed_evolution = [&](double s) {
    return apply_function_compressed(
        model.hamiltonian(), [s](double x) { return std::exp(Complex(0.0, -s * x)); }, model.eigen_isometry());
  };

  CounterexampleReport report;
  report.step = t / static_cast<double>(n);
  const ComplexMatrix step = compressed_evolution(report.step);

  // Window rows that also lie in [a+s, b+s].
  const double tol = 1e-9 * chart.grid_step;
  const double lo = chart.a() + report.step;
  const double hi = chart.b() + report.step;
  RealVector outside(model.rank());
  for (Index i = 0; i < model.rank(); ++i) {
    const double x = chart.position(chart.first + i);
    outside(i) = (x >= lo - tol && x <= hi + tol) ? 0.0 : 1.0;
  }
  report.identity_residual = operator_norm(outside.cast<Complex>().asDiagonal() * step);

  const ComplexMatrix limit = compressed_evolution(t);
  const ComplexMatrix product = matrix_power(step, n);
  report.limit_residual = operator_norm(product - limit);
  report.product_norm = operator_norm(product);

  const ComplexMatrix evolved = limit * test_vectors;
  report.contraction_witness = evolved.cols() == 0 ? 1.0 : std::numeric_limits<double>::infinity();
  for (Index j = 0; j < evolved.cols(); ++j) {
    report.evolved_norms.push_back(evolved.col(j).norm());
    report.contraction_witness = std::min(report.contraction_witness, report.evolved_norms.back());
  }
  return report;
}

}  // namespace zeno
