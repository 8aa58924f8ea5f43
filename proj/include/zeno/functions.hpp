// Registry and grid verification of admissible functions φ: [0,∞) → ℂ
// (|φ| ≤ 1, φ(0) = 1, φ'(+0) = −i), their Kato-part decomposition
// φ = ψ − i(1 − ϕ), spectral cutoffs φ·χ_Δ and the auxiliary functions
// p, p_± and p_α used by the convergence bounds.
//
// All verification happens on a finite grid; reports say "on grid" for that
// reason and nothing here certifies behaviour between grid points.

#pragma once

#include "zeno/spectral.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace zeno {

using RealFunction = std::function<double(double)>;

enum class Verdict { unverified, yes, no };

std::string_view to_string(Verdict v);

struct Interval {
  double lower;
  double upper;  // exclusive; may be +infinity
};

// Finite union of sorted, pairwise disjoint half-open intervals [a, b) whose
// first member starts at 0.
class IntervalUnion {
 public:
  explicit IntervalUnion(std::vector<Interval> intervals);

  const std::vector<Interval>& intervals() const { return intervals_; }
  bool contains(double x) const;
  IntervalUnion intersect(const IntervalUnion& other) const;
  std::string to_string() const;

  friend bool operator==(const IntervalUnion& a, const IntervalUnion& b);

 private:
  std::vector<Interval> intervals_;
};

struct FunctionFlags {
  Verdict admissible = Verdict::unverified;
  Verdict kato = Verdict::unverified;  // Kato part 1 + ℑφ is a Kato function
  Verdict im_nonpositive = Verdict::unverified;
};

struct FunctionSpec {
  std::string id;
  ScalarFunction evaluator;
  FunctionFlags flags;
  std::optional<IntervalUnion> cutoff;  // already folded into evaluator

  Complex operator()(double x) const { return evaluator(x); }
};

// 10^4 log-spaced points on [1e-6, 1e3].
const std::vector<double>& standard_grid();
std::vector<double> log_grid(double lo, double hi, std::size_t count);

// {1e-3, 1e-4, 1e-5, 1e-6, 1e-7}.
const std::vector<double>& standard_steps();

std::vector<std::string> builtin_ids();

// exp, resolvent-1, resolvent-2, resolvent-3, cutoff-exp-[0,pi). The unicode
// spelling cutoff-exp-[0,π) is accepted as an alias. Flags are unverified.
FunctionSpec builtin(std::string_view id);

struct AdmissibilityReport {
  bool bounded_by_one = false;
  bool value_one_at_zero = false;
  Complex derivative_at_zero;
  bool derivative_is_minus_i = false;
  bool admissible = false;
  bool im_nonpositive = false;
  double sup_modulus = 0.0;
  std::vector<double> violating_points;  // grid x with ℑφ(x) > 1e-12
};

AdmissibilityReport verify_admissible(const FunctionSpec& spec,
                                      std::span<const double> grid = standard_grid(),
                                      std::span<const double> steps = standard_steps());

// Copies the report's verdicts into the spec's flags.
FunctionSpec with_verification(FunctionSpec spec, const AdmissibilityReport& report);

// verify_admissible on the standard grid, then with_verification.
FunctionSpec verified(FunctionSpec spec);

// One-sided difference quotients (f(h) − f(0))/h at each step, one Richardson
// pass for consecutive steps, and the extrapolant whose neighbour agrees best.
Complex one_sided_derivative(const ScalarFunction& f, std::span<const double> steps);

struct Decomposition {
  RealFunction psi;        // ℜφ
  RealFunction omega;      // −ℑφ
  RealFunction kato_part;  // 1 − ω
  double omega_slope_at_zero = 0.0;
};

Decomposition kato_part_decompose(const FunctionSpec& spec,
                                  std::span<const double> grid = standard_grid());

FunctionSpec cutoff_regularize(const FunctionSpec& spec, const IntervalUnion& delta,
                               std::span<const double> grid = standard_grid());

// p(0) = i, p(x) = (1 − φ(x))/x.
Complex p_function(const FunctionSpec& spec, double x);

// C_p: sup |p| over {0} ∪ grid ∪ extra.
double p_sup(const FunctionSpec& spec, std::span<const double> grid = standard_grid(),
             std::span<const double> extra = {});

struct PBounds {
  double minus;
  double plus;
};

// inf/sup of (1 − ϕ(s))/s over s ∈ (0, x] sampled at grid points, x itself and
// min(x, 1e-8). Both are 1 at x = 0.
PBounds p_bounds(const RealFunction& kato_part, double x,
                 std::span<const double> grid = standard_grid());

// Same bounds evaluated as ω(s)/s, which avoids the cancellation in 1 − ϕ(s)
// for small s.
PBounds p_bounds(const Decomposition& decomposition, double x,
                 std::span<const double> grid = standard_grid());

// p_α(0) = 0, p_α(x) = (p(x) − i)/x^α.
Complex p_alpha(const FunctionSpec& spec, double alpha, double x);

inline constexpr double kMaxPAlphaSup = 1e6;

// C_α: sup |p_α| over grid ∪ extra. Throws ValidationError above 1e6, where
// the function fails the regularity condition.
double p_alpha_sup(const FunctionSpec& spec, double alpha,
                   std::span<const double> grid = standard_grid(),
                   std::span<const double> extra = {});

}  // namespace zeno
