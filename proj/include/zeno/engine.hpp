// Core computations for the modified Zeno product formula
//
//     (V* φ(tH/n) V)^n  →  e^{−itK},   K = (√H V)*(√H V),
//
// on a finite-dimensional ambient space: the generator K, the interlaced
// products and their targets, error metrics, the certified norm bound, and
// numerical residuals for each resolvent limit on the strong-convergence proof
// path. Everything is a pure function of its inputs.

#pragma once

#include "zeno/functions.hpp"
#include "zeno/spectral.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace zeno {

// Geometry of a discrete circle chart (momentum model only).
struct CircleChart {
  Index points = 0;       // N
  double grid_step = 0;   // 2π / N
  Index first = 0;        // 0-based grid index of the window's left end a
  Index last = 0;         // 0-based grid index of the window's right end b

  double position(Index j) const { return grid_step * static_cast<double>(j); }
  double a() const { return position(first); }
  double b() const { return position(last); }
  double length() const { return grid_step * static_cast<double>(points); }
};

struct ModelFlags {
  bool non_negative = false;
  bool commuting = false;
  bool out_of_assumption = false;
};

// A Hamiltonian H on the ambient space and an isometry V onto the subspace h.
class ZenoModel {
 public:
  ZenoModel(std::string id, SpectralOperator hamiltonian, SubspaceProjection subspace,
            bool commuting = false, bool out_of_assumption = false,
            std::optional<CircleChart> chart = std::nullopt);

  const std::string& id() const { return id_; }
  const SpectralOperator& hamiltonian() const { return hamiltonian_; }
  const SubspaceProjection& subspace() const { return subspace_; }
  const ModelFlags& flags() const { return flags_; }
  const std::optional<CircleChart>& chart() const { return chart_; }
  Index rank() const { return subspace_.rank(); }
  Index ambient_dim() const { return subspace_.ambient_dim(); }

  // U* V, the isometry expressed in the eigenbasis of H.
  const ComplexMatrix& eigen_isometry() const { return eigen_isometry_; }
  const ComplexMatrix& dense_hamiltonian() const { return dense_hamiltonian_; }

  // ‖PH − HP‖.
  double commutator_norm() const;

 private:
  std::string id_;
  SpectralOperator hamiltonian_;
  SubspaceProjection subspace_;
  ModelFlags flags_;
  std::optional<CircleChart> chart_;
  ComplexMatrix eigen_isometry_;
  ComplexMatrix dense_hamiltonian_;
};

// K = (√H V)*(√H V). Requires a non-negative model.
ComplexMatrix zeno_generator(const ZenoModel& model);

// F(τ) = V* φ(τH) V.
ComplexMatrix zeno_step(const ZenoModel& model, const FunctionSpec& spec, double tau);

// S(τ) = (I − F(τ))/τ.
ComplexMatrix defect_operator(const ZenoModel& model, const FunctionSpec& spec, double tau);

// ‖(I − F(τ)) − τ (√H V)* p(τH) (√H V)‖.
double factorization_residual(const ZenoModel& model, const FunctionSpec& spec, double tau);

// F(t/n)^n by binary exponentiation.
ComplexMatrix zeno_product(const ZenoModel& model, const FunctionSpec& spec, double t, std::uint64_t n);

// e^{−itK} via the eigendecomposition of K.
ComplexMatrix zeno_target(const ZenoModel& model, double t);

// The rank standard basis vectors of h followed by 8 seeded random unit vectors.
ComplexMatrix standard_test_vectors(Index rank, std::uint64_t seed);

// count seeded random unit vectors in ℂ^dim (columns).
ComplexMatrix random_unit_vectors(Index dim, Index count, std::uint64_t seed);

struct ErrorMetrics {
  double norm_error = 0.0;
  std::vector<double> strong_errors;
};

ErrorMetrics error_metrics(const ComplexMatrix& product, const ComplexMatrix& target,
                           const ComplexMatrix& test_vectors);

// Mean over test vectors of ∫_0^{t_max} ‖(F(t/n)^n − e^{−itK}) f‖² dt by the
// composite trapezoid rule on `nodes` equispaced nodes (odd, ≥ 33).
double time_averaged_error(const ZenoModel& model, const FunctionSpec& spec, std::uint64_t n,
                           double t_max, std::size_t nodes, const ComplexMatrix& test_vectors);

struct BoundCertificate {
  double lhs = 0.0;
  double rhs = 0.0;
  double chernoff_term = 0.0;
  double semigroup_term = 0.0;
  double c_p = 0.0;
  double c_alpha = 0.0;
  bool pass = false;
};

// ‖F(t/n)^n − e^{−itK}‖ ≤ C_p t‖K‖/√n + t (t/n)^α C_α ‖K_α‖, with
// K_α = (√(H^{1+α}) V)*(√(H^{1+α}) V). C_p and C_α are suprema over the grid
// augmented with the points tλ/n of the actual spectrum.
BoundCertificate certify_bound(const ZenoModel& model, const FunctionSpec& spec, double t,
                               std::uint64_t n, double alpha,
                               std::span<const double> grid = standard_grid());

// V* H^{1+α} V with negative clamped eigenvalues treated as 0.
ComplexMatrix regularity_generator(const ZenoModel& model, double alpha);

// Names of the four resolvent-limit residual series.
inline constexpr const char* kKatoResolvent = "kato_resolvent";          // (I+L_0)^{-1} → (I+K)^{-1}
inline constexpr const char* kFullResolvent = "full_resolvent";          // (I+L)^{-1} → (I+K)^{-1}
inline constexpr const char* kNormalizedResolvent = "normalized_resolvent";  // (I+M)^{-1} → I
inline constexpr const char* kDefectResolvent = "defect_resolvent";      // (I+S)^{-1} → (I+iK)^{-1}

using ResidualSeries = std::map<std::string, std::vector<double>>;

// For each τ builds L_0(τ) = V*(I − ϕ(τH))V/τ, L(τ) = V*(I − ψ(τH))V/τ + L_0(τ),
// M(τ) = (I+L_0)^{-1/2} V*(I − ψ(τH))V/τ (I+L_0)^{-1/2} and S(τ), and returns
// operator-norm residuals of the four resolvent limits. Requires a spec
// verified to have non-positive imaginary part.
ResidualSeries proof_path_diagnostics(const ZenoModel& model, const FunctionSpec& spec,
                                      std::span<const double> taus);

struct SandwichReport {
  std::vector<double> lower_margins;
  std::vector<double> upper_margins;
  // Quadratic forms per vector: lower ≤ central ≤ upper and lower ≤ (Kf,f) ≤ upper.
  std::vector<double> lower_form;
  std::vector<double> central_form;
  std::vector<double> upper_form;
  std::vector<double> generator_form;
  bool pass = false;
};

inline constexpr double kSandwichSlack = 1e-9;

SandwichReport sandwich_check(const ZenoModel& model, const Decomposition& decomposition, double tau,
                              const ComplexMatrix& vectors,
                              std::span<const double> grid = standard_grid());

// t^{-1} ‖V* e^{−itH} V − e^{−itK}‖.
double graf_guekos_residual(const ZenoModel& model, double t);

// e^{−isH} on the ambient space.
ComplexMatrix unitary_evolution(const SpectralOperator& h, double s);

struct CounterexampleReport {
  double step = 0.0;                 // s = t/n
  double identity_residual = 0.0;    // translation identity at s
  double limit_residual = 0.0;       // ‖(V* e^{−isH} V)^n − V* e^{−itH} V‖
  double contraction_witness = 1.0;  // min_f ‖V* e^{−itH} V f‖
  std::vector<double> evolved_norms; // ‖V* e^{−itH} V f‖ per test vector
  double product_norm = 0.0;         // ‖(V* e^{−isH} V)^n‖
};

// Requires a model flagged out-of-assumption with a circle chart, and a
// window that stays inside the chart when translated by t.
CounterexampleReport counterexample_run(const ZenoModel& model, double t, std::uint64_t n,
                                        const ComplexMatrix& test_vectors);

// Binary exponentiation of a square matrix.
ComplexMatrix matrix_power(const ComplexMatrix& a, std::uint64_t n);

struct ConvergenceRecord {
  std::string model_id;
  std::string function_id;
  double t = 0.0;
  std::uint64_t n = 0;
  std::optional<double> norm_error;
  std::vector<double> strong_errors;
  std::optional<double> avg_error;
  std::optional<double> bound_lhs;
  std::optional<double> bound_rhs;
  std::optional<bool> bound_pass;
  std::map<std::string, double> diagnostics;
  std::vector<std::string> notes;  // per-metric failures; empty when all succeeded
  bool guard_tripped = false;
};

}  // namespace zeno
