#include "zeno/functions.hpp"

#include "zeno/format.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>

namespace zeno {

namespace {

constexpr Complex kI{0.0, 1.0};
constexpr double kModulusSlack = 1e-12;
constexpr double kImagSlack = 1e-12;
constexpr double kDerivativeWindow = 1e-4;
constexpr double kOriginValueTolerance = 1e-12;

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

Complex checked_eval(const FunctionSpec& spec, double x) {
  const Complex v = spec(x);
  if (!finite(v))
    throw ValidationError("function " + spec.id + " is not finite at x = " + format_double(x));
  return v;
}

Complex exp_minus_i(double x) { return {std::cos(x), -std::sin(x)}; }

ScalarFunction resolvent(int k) {
  return [k](double x) {
    const Complex base = 1.0 / Complex(1.0, x / k);
    Complex r = 1.0;
    for (int i = 0; i < k; ++i) r *= base;
    return r;
  };
}

ScalarFunction with_indicator(ScalarFunction f, IntervalUnion delta) {
  return [f = std::move(f), delta = std::move(delta)](double x) -> Complex {
    return delta.contains(x) ? f(x) : Complex{0.0, 0.0};
  };
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::yes: return "true";
    case Verdict::no: return "false";
    case Verdict::unverified: break;
  }
  return "unverified";
}

// ---------------------------------------------------------------- intervals

IntervalUnion::IntervalUnion(std::vector<Interval> intervals) : intervals_(std::move(intervals)) {
  if (intervals_.empty()) throw ValidationError("IntervalUnion: no intervals");
  if (intervals_.front().lower != 0.0)
    throw ValidationError("IntervalUnion: first interval must start at 0 (neighbourhood of zero)");
  for (std::size_t i = 0; i < intervals_.size(); ++i) {
    const auto& iv = intervals_[i];
    if (std::isnan(iv.lower) || std::isnan(iv.upper) || !(iv.lower >= 0.0) || !(iv.lower < iv.upper))
      throw ValidationError("IntervalUnion: each interval needs 0 <= a < b");
    if (i > 0 && iv.lower < intervals_[i - 1].upper)
      throw ValidationError("IntervalUnion: intervals must be sorted and disjoint");
  }
}

bool IntervalUnion::contains(double x) const {
  return std::any_of(intervals_.begin(), intervals_.end(),
                     [x](const Interval& iv) { return x >= iv.lower && x < iv.upper; });
}

IntervalUnion IntervalUnion::intersect(const IntervalUnion& other) const {
  std::vector<Interval> out;
  for (const auto& a : intervals_) {
    for (const auto& b : other.intervals_) {
      const double lo = std::max(a.lower, b.lower);
      const double hi = std::min(a.upper, b.upper);
      if (lo < hi) out.push_back({lo, hi});
    }
  }
  std::sort(out.begin(), out.end(), [](const Interval& a, const Interval& b) { return a.lower < b.lower; });
  return IntervalUnion(std::move(out));
}

std::string IntervalUnion::to_string() const {
  std::string s;
  for (std::size_t i = 0; i < intervals_.size(); ++i) {
    if (i > 0) s += "+";
    s += "[" + format_double(intervals_[i].lower) + "," + format_double(intervals_[i].upper) + ")";
  }
  return s;
}

bool operator==(const IntervalUnion& a, const IntervalUnion& b) {
  return std::equal(a.intervals_.begin(), a.intervals_.end(), b.intervals_.begin(), b.intervals_.end(),
                    [](const Interval& x, const Interval& y) {
                      return x.lower == y.lower && x.upper == y.upper;
                    });
}

// ---------------------------------------------------------------- registry

std::vector<double> log_grid(double lo, double hi, std::size_t count) {
  if (!(lo > 0.0) || !(hi > lo) || count < 2) throw ValidationError("log_grid: need 0 < lo < hi, count >= 2");
  std::vector<double> grid(count);
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (std::size_t i = 0; i < count; ++i)
    grid[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1));
  grid.front() = lo;
  grid.back() = hi;
  return grid;
}

const std::vector<double>& standard_grid() {
  static const std::vector<double> grid = log_grid(1e-6, 1e3, 10000);
  return grid;
}

const std::vector<double>& standard_steps() {
  static const std::vector<double> steps{1e-3, 1e-4, 1e-5, 1e-6, 1e-7};
  return steps;
}

std::vector<std::string> builtin_ids() {
  return {"exp", "resolvent-1", "resolvent-2", "resolvent-3", "cutoff-exp-[0,pi)"};
}

FunctionSpec builtin(std::string_view id) {
  if (id == "exp") return {std::string(id), exp_minus_i, {}, std::nullopt};
  if (id == "resolvent-1") return {std::string(id), resolvent(1), {}, std::nullopt};
  if (id == "resolvent-2") return {std::string(id), resolvent(2), {}, std::nullopt};
  if (id == "resolvent-3") return {std::string(id), resolvent(3), {}, std::nullopt};
  if (id == "cutoff-exp-[0,pi)" || id == "cutoff-exp-[0,π)") {
    IntervalUnion delta({{0.0, std::numbers::pi}});
    return {"cutoff-exp-[0,pi)", with_indicator(exp_minus_i, delta), {}, delta};
  }
  throw ValidationError("unknown function id: " + std::string(id));
}

// ---------------------------------------------------------------- verification

Complex one_sided_derivative(const ScalarFunction& f, std::span<const double> steps) {
  if (steps.empty()) throw ValidationError("derivative: no steps");
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (!(steps[i] > 0.0) || (i > 0 && !(steps[i] < steps[i - 1])))
      throw ValidationError("derivative: steps must be positive and decreasing");
  }
  const Complex f0 = f(0.0);
  std::vector<Complex> quotients;
  for (double h : steps) quotients.push_back((f(h) - f0) / h);
  if (quotients.size() == 1) return quotients.front();

  // Forward differences carry an O(h) error; eliminate it pairwise.
  std::vector<Complex> extrapolated;
  for (std::size_t k = 0; k + 1 < quotients.size(); ++k) {
    const double r = steps[k] / steps[k + 1];
    extrapolated.push_back((r * quotients[k + 1] - quotients[k]) / (r - 1.0));
  }
  std::size_t best = 0;
  double best_gap = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < extrapolated.size(); ++k) {
    const double gap = std::abs(extrapolated[k] - extrapolated[k - 1]);
    if (gap < best_gap) {
      best_gap = gap;
      best = k;
    }
  }
  return extrapolated[best];
}

AdmissibilityReport verify_admissible(const FunctionSpec& spec, std::span<const double> grid,
                                      std::span<const double> steps) {
  if (!spec.evaluator) throw ValidationError("function " + spec.id + " has no evaluator");
  AdmissibilityReport report;
  const Complex at_zero = checked_eval(spec, 0.0);
  report.sup_modulus = std::abs(at_zero);
  bool im_ok = at_zero.imag() <= kImagSlack;
  for (double x : grid) {
    const Complex v = checked_eval(spec, x);
    report.sup_modulus = std::max(report.sup_modulus, std::abs(v));
    if (v.imag() > kImagSlack) {
      im_ok = false;
      report.violating_points.push_back(x);
    }
  }
  report.bounded_by_one = report.sup_modulus <= 1.0 + kModulusSlack;
  report.value_one_at_zero = std::abs(at_zero - 1.0) <= kOriginValueTolerance;
  report.derivative_at_zero = one_sided_derivative(spec.evaluator, steps);
  report.derivative_is_minus_i = std::abs(report.derivative_at_zero + kI) <= kDerivativeWindow;
  report.admissible = report.bounded_by_one && report.value_one_at_zero && report.derivative_is_minus_i;
  report.im_nonpositive = im_ok;
  return report;
}

FunctionSpec with_verification(FunctionSpec spec, const AdmissibilityReport& report) {
  const auto verdict = [](bool b) { return b ? Verdict::yes : Verdict::no; };
  spec.flags.admissible = verdict(report.admissible);
  spec.flags.im_nonpositive = verdict(report.im_nonpositive);
  spec.flags.kato = verdict(report.admissible && report.im_nonpositive);
  return spec;
}

FunctionSpec verified(FunctionSpec spec) {
  const auto report = verify_admissible(spec);
  return with_verification(std::move(spec), report);
}

// ---------------------------------------------------------------- decomposition

Decomposition kato_part_decompose(const FunctionSpec& spec, std::span<const double> grid) {
  if (spec.flags.im_nonpositive != Verdict::yes)
    throw ValidationError("kato_part_decompose: " + spec.id +
                          " is not verified to have non-positive imaginary part");
  Decomposition d;
  d.psi = [spec](double x) { return spec(x).real(); };
  d.omega = [spec](double x) { return -spec(x).imag(); };
  d.kato_part = [spec](double x) { return 1.0 + spec(x).imag(); };

  auto check_point = [&](double x) {
    const Complex v = checked_eval(spec, x);
    const double omega = -v.imag();
    if (std::abs(v.real()) > 1.0 + kModulusSlack)
      throw ValidationError("kato_part_decompose: |psi| > 1 at x = " + format_double(x));
    if (omega < -kImagSlack || omega > 1.0 + kImagSlack)
      throw ValidationError("kato_part_decompose: omega outside [0,1] at x = " + format_double(x));
  };
  check_point(0.0);
  for (double x : grid) check_point(x);
  if (std::abs(d.psi(0.0) - 1.0) > kOriginValueTolerance || std::abs(d.kato_part(0.0) - 1.0) > kOriginValueTolerance)
    throw ValidationError("kato_part_decompose: psi(0) and kato_part(0) must equal 1");

  const ScalarFunction omega_c = [&d](double x) { return Complex(d.omega(x), 0.0); };
  d.omega_slope_at_zero = one_sided_derivative(omega_c, standard_steps()).real();
  if (std::abs(d.omega_slope_at_zero - 1.0) > kDerivativeWindow)
    throw ValidationError("kato_part_decompose: omega'(+0) is not 1");
  return d;
}

FunctionSpec cutoff_regularize(const FunctionSpec& spec, const IntervalUnion& delta,
                               std::span<const double> grid) {
  auto check = [&](double x) {
    if (delta.contains(x) && checked_eval(spec, x).imag() > kImagSlack)
      throw ValidationError("cutoff_regularize: Im phi > 0 at x = " + format_double(x) +
                            " inside the cutoff set");
  };
  check(0.0);
  for (double x : grid) check(x);

  const IntervalUnion combined = spec.cutoff ? spec.cutoff->intersect(delta) : delta;
  FunctionSpec out;
  out.id = (spec.cutoff && *spec.cutoff == combined) ? spec.id : spec.id + "@" + delta.to_string();
  out.evaluator = with_indicator(spec.evaluator, delta);
  out.cutoff = combined;
  const auto report = verify_admissible(out, grid);
  if (!report.admissible || !report.im_nonpositive)
    throw ValidationError("cutoff_regularize: result of " + out.id +
                          " is not an admissible function with non-positive imaginary part");
  return with_verification(std::move(out), report);
}

// ---------------------------------------------------------------- p, p_±, p_α

Complex p_function(const FunctionSpec& spec, double x) {
  if (!(x >= 0.0)) throw ValidationError("p_function: x must be >= 0");
  if (x == 0.0) return kI;
  return (1.0 - spec(x)) / x;
}

double p_sup(const FunctionSpec& spec, std::span<const double> grid, std::span<const double> extra) {
  double sup = 1.0;  // |p(0)|
  auto visit = [&](double x) {
    if (x <= 0.0) return;
    const Complex p = p_function(spec, x);
    if (!finite(p)) throw ValidationError("p_sup: p is not finite for " + spec.id);
    sup = std::max(sup, std::abs(p));
  };
  for (double x : grid) visit(x);
  for (double x : extra) visit(x);
  return sup;
}

namespace {

// inf/sup of ratio(s) over the sampled (0, x].
template <typename Ratio>
PBounds ratio_bounds(Ratio ratio, double x, std::span<const double> grid) {
  if (!(x >= 0.0)) throw ValidationError("p_bounds: x must be >= 0");
  if (grid.empty()) throw ValidationError("p_bounds: empty grid");
  if (x == 0.0) return {1.0, 1.0};

  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  auto visit = [&](double s) {
    const double q = ratio(s);
    lo = std::min(lo, q);
    hi = std::max(hi, q);
  };
  for (double s : grid) {
    if (s > 0.0 && s <= x) visit(s);
  }
  visit(x);
  visit(std::min(x, 1e-8));
  if (lo < -1e-9 || lo > 1.0 + 1e-9 || hi < 1.0 - 1e-9)
    throw ValidationError("p_bounds: kato part violates 0 <= p_minus <= 1 <= p_plus");
  return {lo, hi};
}

}  // namespace

PBounds p_bounds(const RealFunction& kato_part, double x, std::span<const double> grid) {
  return ratio_bounds([&](double s) { return (1.0 - kato_part(s)) / s; }, x, grid);
}

PBounds p_bounds(const Decomposition& decomposition, double x, std::span<const double> grid) {
  return ratio_bounds([&](double s) { return decomposition.omega(s) / s; }, x, grid);
}

Complex p_alpha(const FunctionSpec& spec, double alpha, double x) {
  if (!(alpha > 0.0)) throw ValidationError("p_alpha: alpha must be > 0");
  if (!(x >= 0.0)) throw ValidationError("p_alpha: x must be >= 0");
  if (x == 0.0) return 0.0;
  return (p_function(spec, x) - kI) / std::pow(x, alpha);
}

double p_alpha_sup(const FunctionSpec& spec, double alpha, std::span<const double> grid,
                   std::span<const double> extra) {
  double sup = 0.0;
  auto visit = [&](double x) {
    if (x <= 0.0) return;
    const double m = std::abs(p_alpha(spec, alpha, x));
    if (!std::isfinite(m) || m > kMaxPAlphaSup)
      throw ValidationError("p_alpha is unbounded for " + spec.id + " at alpha = " + format_double(alpha));
    sup = std::max(sup, m);
  };
  for (double x : grid) visit(x);
  for (double x : extra) visit(x);
  return sup;
}

}  // namespace zeno
