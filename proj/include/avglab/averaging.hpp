#pragma once

// Birkhoff averages S_N(f, x) = (1/N) sum_{n<N} f(u_n x) along orbits,
// convergence traces against the mean, the Sobol product criterion and the
// comparison with the Renyi-Parry density of the beta-transformation.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "avglab/apfunctions.hpp"
#include "avglab/orbit.hpp"

namespace avglab {

// Running compensated sum of f along an orbit, index-ascending.
class BirkhoffAccumulator {
 public:
  BirkhoffAccumulator(const ApFunction& f, const FractionalOrbit& orbit);
  // Adds terms up to index n - 1.
  void advance_to(std::size_t n);
  std::size_t count() const { return count_; }
  cplx average() const;

 private:
  cplx term(std::size_t i) const;

  const ApFunction* f_;
  const FractionalOrbit* orbit_;
  bool use_entries_;
  std::optional<BigEvaluator> big_;
  std::size_t count_ = 0;
  double re_ = 0.0, re_c_ = 0.0;
  double im_ = 0.0, im_c_ = 0.0;
};

// Periodic f whose period divides the orbit scale is evaluated on the
// reduced entries; any other f needs the unreduced values.
cplx birkhoff_average(const ApFunction& f, const FractionalOrbit& orbit, std::size_t n);
// f evaluated directly at the given values.
cplx birkhoff_average(const ApFunction& f, std::span<const double> values);

struct AverageCheckpoint {
  std::size_t n;
  cplx value;
  double abs_error;
};

struct AverageTrace {
  std::vector<AverageCheckpoint> checkpoints;
  cplx target;
};

std::vector<std::size_t> default_schedule();

// S_N at each checkpoint; target defaults to mean(f).
AverageTrace convergence_trace(const ApFunction& f, const FractionalOrbit& orbit,
                               const std::vector<std::size_t>& schedule, std::optional<cplx> target = {});

struct SobolRow {
  std::size_t n;
  double discrepancy;  // extreme discrepancy of the prefix
  double variation;    // V_N(z, 1 + epsilon)
  double product;
};

struct SobolReport {
  double eta;
  double epsilon;
  std::vector<SobolRow> rows;
  // Product strictly decreasing over the final three checkpoints.
  bool decreasing;
};

// eta = (1/2 - a_z)/2, epsilon defaults to min(0.1, eta); eta - epsilon/2 > 0
// is required.
SobolReport sobol_criterion(const SingularPeriodic& f, const FractionalOrbit& orbit, double z,
                            std::optional<double> epsilon, const std::vector<std::size_t>& schedule);

// Piecewise constant density on [0,1): values[i] on [breaks[i-1], breaks[i]).
class RenyiParryDensity {
 public:
  RenyiParryDensity(std::vector<double> breaks, std::vector<double> values);
  // h_tau: (5+3 sqrt5)/10 on [0, 1/tau), (5+sqrt5)/10 on [1/tau, 1).
  static RenyiParryDensity golden();
  // Built-in density for alpha, if any.
  static std::optional<RenyiParryDensity> for_multiplier(const Multiplier& alpha);
  // The built-in h_tau integrates to one, checked in Z[sqrt5].
  static bool golden_normalised_exactly();

  const std::vector<double>& breaks() const { return breaks_; }
  const std::vector<double>& values() const { return values_; }
  double operator()(double x) const;
  // int_0^1 f h.
  cplx integrate(const ApFunction& f) const;
  PeriodicFunction as_function() const;

 private:
  std::vector<double> breaks_;
  std::vector<double> values_;
};

struct SampleStats {
  double median = 0.0;
  double q25 = 0.0;
  double q75 = 0.0;
  double iqr() const { return q75 - q25; }
};

// Quantiles by linear interpolation between order statistics.
SampleStats sample_stats(std::vector<double> values);

struct RenyiParryReport {
  cplx lebesgue_mean;
  cplx density_integral;
  std::vector<double> exp_averages;   // Re S_N along alpha^n x
  std::vector<double> beta_averages;  // Re S_N along T^n <x>
  SampleStats exp_stats;
  SampleStats beta_stats;
};

// Beta orbits start at the fractional part of each sample and run in
// certified mode.
RenyiParryReport renyi_parry_compare(const ApFunction& f, const Multiplier& alpha,
                                     const std::vector<SeedPoint>& x_samples, std::size_t n,
                                     double target_error = 0x1.0p-40);

}  // namespace avglab
