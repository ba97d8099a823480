#pragma once

// Function classes averaged along orbits: trigonometric polynomials,
// periodic functions, periodic functions with power singularities, truncated
// Bohr series and Stepanov functions with singularities on a uniformly
// discrete set.

#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "avglab/bigfloat.hpp"
#include "avglab/constant.hpp"
#include "avglab/diophantine.hpp"

namespace avglab {

using cplx = std::complex<double>;

struct TrigTerm {
  RealConstant k;
  cplx a;
};

// a0 + sum_l a_l exp(2 pi i k_l x), frequencies distinct and non-zero.
class TrigPolynomial {
 public:
  explicit TrigPolynomial(cplx a0 = 0.0, std::vector<TrigTerm> terms = {});
  // sin(2 pi m x) and cos(2 pi m x).
  static TrigPolynomial sine(long m = 1);
  static TrigPolynomial cosine(long m = 1);
  // exp(2 pi i k x)
  static TrigPolynomial character(RealConstant k);

  cplx a0() const { return a0_; }
  const std::vector<TrigTerm>& terms() const { return terms_; }
  cplx operator()(double x) const;
  cplx derivative(double x) const;
  cplx integral(double lo, double hi) const;
  // True when every frequency is an integer.
  bool one_periodic() const;
  double sup_bound() const;

 private:
  cplx a0_;
  std::vector<TrigTerm> terms_;
  std::vector<double> k_;  // cached frequencies
};

enum class Integrability { locally_riemann, lebesgue_only };

// L-periodic function given on [0, L). Step functions and functions with a
// known antiderivative integrate in closed form; others use adaptive
// Gauss-Kronrod quadrature split at the declared breakpoints.
class PeriodicFunction {
 public:
  using Eval = std::function<cplx(double)>;

  PeriodicFunction(double period, Eval f, std::string description,
                   Integrability integrability = Integrability::locally_riemann);

  // Piecewise constant on [0,1): values[i] on [breaks[i-1], breaks[i]) with
  // breaks[-1] = 0 and breaks[n] = 1.
  static PeriodicFunction step(std::vector<double> breaks, std::vector<cplx> values);
  static PeriodicFunction indicator(double lo, double hi);
  // sin(2 pi x) with its closed-form antiderivative.
  static PeriodicFunction sine();

  PeriodicFunction& with_antiderivative(Eval primitive);
  PeriodicFunction& with_derivative(Eval derivative);
  PeriodicFunction& with_breakpoints(std::vector<double> points);
  PeriodicFunction& with_sup_bound(double bound);

  double period() const { return period_; }
  Integrability integrability() const { return integrability_; }
  const std::string& description() const { return description_; }
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  bool is_step() const { return !step_values_.empty(); }
  const std::vector<cplx>& step_values() const { return step_values_; }
  bool has_derivative() const { return static_cast<bool>(derivative_); }
  std::optional<double> sup_bound() const { return sup_bound_; }

  cplx operator()(double x) const;
  cplx derivative(double x) const;
  cplx integral(double lo, double hi) const;

 private:
  cplx period_integral(double y) const;  // integral over [0, y], 0 <= y <= period

  double period_;
  Eval f_;
  Eval primitive_;
  Eval derivative_;
  std::string description_;
  Integrability integrability_;
  std::vector<double> breakpoints_;
  std::vector<cplx> step_values_;
  std::optional<double> sup_bound_;
  cplx full_period_ = std::numeric_limits<double>::quiet_NaN();
};

// Local model around z: c_right * t^-a on (z, z + delta) and c_left * t^-a
// on (z - delta, z), t = |x - z|. A zero coefficient switches a side off; a
// singularity with both coefficients zero only declares a window.
struct Singularity {
  double z = 0.0;
  double a = 0.25;
  double c_left = 1.0;
  double c_right = 1.0;
  double delta = 0.5;
};

// 1-periodic sum of singular local models plus a remainder.
class SingularPeriodic {
 public:
  explicit SingularPeriodic(std::vector<Singularity> singularities,
                            std::optional<PeriodicFunction> remainder = std::nullopt);
  // <x>^-a: one-sided model at 0 with delta = 1.
  static SingularPeriodic frac_power(double a);
  // c |x - z|^-a on (z - delta, z + delta).
  static SingularPeriodic symmetric_power(double z, double a, double c, double delta);

  const std::vector<Singularity>& singularities() const { return singularities_; }
  const std::optional<PeriodicFunction>& remainder() const { return remainder_; }

  cplx operator()(double x) const;
  // Derivative of the singular models (remainder excluded).
  double model_derivative(double x) const;
  cplx integral(double lo, double hi) const;
  cplx mean() const;
  std::string description() const;

 private:
  double model_primitive(double y) const;  // integral of the models over [0, y], 0 <= y <= 1
  std::vector<Singularity> singularities_;
  std::optional<PeriodicFunction> remainder_;
  double model_mean_ = 0.0;
};

struct TruncatedBohr {
  TrigPolynomial poly;
  double tail;
};

// a0 + sum_l a_l exp(2 pi i k_l x) with sum |a_l| < inf. `extra_tail` bounds
// the coefficients beyond the stored terms.
class BohrSeries {
 public:
  BohrSeries(cplx a0, std::vector<TrigTerm> terms, double extra_tail = 0.0);
  // Frequencies 1, sqrt2, tau, sqrt3, sqrt5, sqrt6, ... with a_l = 2^(1-l),
  // l = 1..count; extra_tail = 2^(1-count).
  static BohrSeries geometric(std::size_t count);

  cplx a0() const { return a0_; }
  const std::vector<TrigTerm>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  double extra_tail() const { return extra_tail_; }
  // sum_{l > m} |a_l| + extra_tail; non-increasing in m.
  double tail(std::size_t m) const;
  TruncatedBohr truncate(std::size_t m) const;
  // Value of the stored partial sum.
  cplx operator()(double x) const;
  cplx integral(double lo, double hi) const;

 private:
  cplx a0_;
  std::vector<TrigTerm> terms_;
  std::vector<double> k_;
  std::vector<double> suffix_;  // suffix_[m] = sum_{l > m} |a_l|
  double extra_tail_;
};

// smooth(x) + c * sum_{y in Y, |x-y| < r} (|x - y|^-a - r^-a), r <= min_gap/2.
class StepanovFunction {
 public:
  StepanovFunction(UniformlyDiscreteSet y, double a, double c, double radius, TrigPolynomial smooth = TrigPolynomial());

  const UniformlyDiscreteSet& set() const { return y_; }
  double exponent() const { return a_; }
  double coefficient() const { return c_; }
  double radius() const { return r_; }
  const TrigPolynomial& smooth() const { return smooth_; }

  cplx operator()(double x) const;
  cplx integral(double lo, double hi) const;
  // a0 + c * density(Y) * 2 r^(1-a) a / (1-a).
  cplx density_mean() const;
  // Value of the local model at offset t = x - y.
  double bump(double t) const;
  std::string description() const;

 private:
  double bump_integral(double t0, double t1) const;  // integral of bump over [t0, t1] within (-r, r)
  UniformlyDiscreteSet y_;
  double a_;
  double c_;
  double r_;
  TrigPolynomial smooth_;
};

// Continuous evaluator without further structure (mollified Stepanov
// functions).
class ContinuousFunction {
 public:
  ContinuousFunction(std::function<cplx(double)> f, std::string description, std::optional<double> sup = {});
  cplx operator()(double x) const { return f_(x); }
  const std::string& description() const { return description_; }
  std::optional<double> sup_bound() const { return sup_; }

 private:
  std::function<cplx(double)> f_;
  std::string description_;
  std::optional<double> sup_;
};

using ApFunction =
    std::variant<TrigPolynomial, PeriodicFunction, SingularPeriodic, BohrSeries, StepanovFunction, ContinuousFunction>;

cplx evaluate(const ApFunction& f, double x);
std::string describe(const ApFunction& f);
// Period p such that f can be evaluated from <x/p> p; nullopt when f is not
// known to be periodic.
std::optional<double> period_of(const ApFunction& f);

// Evaluator at high-precision arguments (unreduced orbit values).
class BigEvaluator {
 public:
  BigEvaluator(const ApFunction& f, mpfr_bits precision);
  cplx operator()(const BigFloat& x) const;

 private:
  const ApFunction* f_;
  mpfr_bits precision_;
  std::vector<BigFloat> freqs_;
  std::vector<cplx> coefs_;
  cplx a0_ = 0.0;
};

struct MeanEstimate {
  cplx value;
  double error = 0.0;
  bool converged = true;
};

// Mean M(f) = lim (1/2T) int_{-T}^{T} f. Exact for trigonometric polynomials
// and Bohr series, one-period quadrature for periodic classes, windowed
// averages with Richardson extrapolation up to T_max otherwise.
MeanEstimate mean(const ApFunction& f, double t_max = 4096.0, double tolerance = 1e-10);

// a(k) = M(exp(-2 pi i k .) f).
MeanEstimate fourier_bohr(const ApFunction& f, const RealConstant& k, double t_max = 4096.0,
                          double tolerance = 1e-10);

struct StepanovNorm {
  double lower_bound;  // max over the grid
  double refined;      // max over the half-step grid
  bool exact;          // one window suffices (period divides 1)
};

// sup_x int_x^{x+1} |f| over the grid x = j * grid_step in [0, span).
StepanovNorm stepanov_norm(const ApFunction& f, double grid_step = 1.0 / 64, double span = 8.0);

// f_delta(x) = (1/2delta) int_{x-delta}^{x+delta} f.
ApFunction mollify(const ApFunction& f, double delta);

// int_{z-delta}^{z-N^-s} |f'| + int_{z+N^-s}^{z+delta} |f'| for a declared
// singularity z.
double variation_V_N(const ApFunction& f, double z, double s, double n);

TruncatedBohr truncate_bohr(const BohrSeries& series, std::size_t m);

// x -> f(x) - g(x); periodic when both share a period.
ApFunction subtract(const ApFunction& f, const ApFunction& g);

// Integral of f over [lo, hi]; closed form where available.
cplx integrate(const ApFunction& f, double lo, double hi, double tolerance = 1e-12);

}  // namespace avglab
