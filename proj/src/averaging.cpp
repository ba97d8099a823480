#include "avglab/averaging.hpp"

#include <algorithm>
#include <cmath>

#include "avglab/equidistribution.hpp"
#include "avglab/error.hpp"

namespace avglab {
namespace {

void neumaier_add(double& sum, double& comp, double v) {
  const double t = sum + v;
  if (std::fabs(sum) >= std::fabs(v))
    comp += (sum - t) + v;
  else
    comp += (v - t) + sum;
  sum = t;
}

// True when f(y) depends only on y modulo `scale`.
bool periodic_modulo(const ApFunction& f, double scale) {
  const auto p = period_of(f);
  if (!p) return false;
  const double m = scale / *p;
  return std::round(m) >= 1.0 && std::fabs(m - std::round(m)) <= 1e-12 * m;
}

}  // namespace

BirkhoffAccumulator::BirkhoffAccumulator(const ApFunction& f, const FractionalOrbit& orbit)
    : f_(&f), orbit_(&orbit), use_entries_(periodic_modulo(f, orbit.scale())) {
  if (!use_entries_) {
    if (!orbit.has_unreduced())
      throw InvalidArgument("function is not periodic modulo the orbit scale; the orbit must retain unreduced values");
    big_.emplace(f, static_cast<mpfr_bits>(std::max<long long>(orbit.working_precision(), 64)));
  }
}

cplx BirkhoffAccumulator::term(std::size_t i) const {
  if (use_entries_) return evaluate(*f_, (*orbit_)[i] * orbit_->scale());
  return (*big_)(orbit_->unreduced(i));
}

void BirkhoffAccumulator::advance_to(std::size_t n) {
  if (n > orbit_->size()) throw InvalidArgument("N exceeds the orbit length");
  for (; count_ < n; ++count_) {
    const cplx v = term(count_);
    neumaier_add(re_, re_c_, v.real());
    neumaier_add(im_, im_c_, v.imag());
  }
}

cplx BirkhoffAccumulator::average() const {
  if (count_ == 0) throw InvalidArgument("average of an empty prefix");
  const double n = static_cast<double>(count_);
  return {(re_ + re_c_) / n, (im_ + im_c_) / n};
}

cplx birkhoff_average(const ApFunction& f, const FractionalOrbit& orbit, std::size_t n) {
  if (n == 0) throw InvalidArgument("N must be >= 1");
  BirkhoffAccumulator acc(f, orbit);
  acc.advance_to(n);
  return acc.average();
}

cplx birkhoff_average(const ApFunction& f, std::span<const double> values) {
  if (values.empty()) throw InvalidArgument("N must be >= 1");
  double re = 0.0, rc = 0.0, im = 0.0, ic = 0.0;
  for (double x : values) {
    const cplx v = evaluate(f, x);
    neumaier_add(re, rc, v.real());
    neumaier_add(im, ic, v.imag());
  }
  const double n = static_cast<double>(values.size());
  return {(re + rc) / n, (im + ic) / n};
}

std::vector<std::size_t> default_schedule() { return {100, 1000, 10000, 100000}; }

namespace {

void check_schedule(const std::vector<std::size_t>& schedule, std::size_t limit) {
  if (schedule.empty()) throw InvalidArgument("schedule must not be empty");
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (schedule[i] == 0) throw InvalidArgument("schedule entries must be >= 1");
    if (i > 0 && schedule[i] <= schedule[i - 1]) throw InvalidArgument("schedule must be strictly increasing");
  }
  if (schedule.back() > limit) throw InvalidArgument("schedule exceeds the orbit length");
}

}  // namespace

AverageTrace convergence_trace(const ApFunction& f, const FractionalOrbit& orbit,
                               const std::vector<std::size_t>& schedule, std::optional<cplx> target) {
  check_schedule(schedule, orbit.size());
  AverageTrace trace;
  trace.target = target ? *target : mean(f).value;
  BirkhoffAccumulator acc(f, orbit);
  for (std::size_t n : schedule) {
    acc.advance_to(n);
    const cplx s = acc.average();
    trace.checkpoints.push_back({n, s, std::abs(s - trace.target)});
  }
  return trace;
}

SobolReport sobol_criterion(const SingularPeriodic& f, const FractionalOrbit& orbit, double z,
                            std::optional<double> epsilon, const std::vector<std::size_t>& schedule) {
  check_schedule(schedule, orbit.size());
  const Singularity* sing = nullptr;
  for (const Singularity& s : f.singularities()) {
    const double d = std::fabs(s.z - (z - std::floor(z)));
    if (std::min(d, 1.0 - d) <= 1e-12) sing = &s;
  }
  if (!sing) throw InvalidArgument("z is not a declared singularity");
  SobolReport report;
  report.eta = (0.5 - sing->a) / 2.0;
  report.epsilon = epsilon ? *epsilon : std::min(0.1, report.eta);
  if (!(report.epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
  if (!(report.eta - report.epsilon / 2.0 > 0.0)) throw InvalidArgument("epsilon must satisfy eta - epsilon/2 > 0");
  const ApFunction g = f;
  for (std::size_t n : schedule) {
    SobolRow row;
    row.n = n;
    row.discrepancy = extreme_discrepancy(orbit.prefix(n));
    row.variation = variation_V_N(g, z, 1.0 + report.epsilon, static_cast<double>(std::max<std::size_t>(n, 2)));
    row.product = row.discrepancy * row.variation;
    report.rows.push_back(row);
  }
  report.decreasing = report.rows.size() >= 3;
  for (std::size_t i = report.rows.size() >= 3 ? report.rows.size() - 2 : 0; i < report.rows.size(); ++i)
    if (i > 0 && !(report.rows[i].product < report.rows[i - 1].product)) report.decreasing = false;
  return report;
}

// ---------------------------------------------------------------------------

RenyiParryDensity::RenyiParryDensity(std::vector<double> breaks, std::vector<double> values)
    : breaks_(std::move(breaks)), values_(std::move(values)) {
  if (values_.size() != breaks_.size() + 1) throw InvalidArgument("density needs one more value than breaks");
  double total = 0.0;
  double prev = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const double end = i < breaks_.size() ? breaks_[i] : 1.0;
    if (!(end > prev)) throw InvalidArgument("density breaks must increase inside (0,1)");
    if (!(values_[i] >= 0.0)) throw InvalidArgument("density must be non-negative");
    total += values_[i] * (end - prev);
    prev = end;
  }
  if (std::fabs(total - 1.0) > 1e-12) throw InvalidArgument("density must integrate to 1");
}

RenyiParryDensity RenyiParryDensity::golden() {
  const double s5 = std::sqrt(5.0);
  return RenyiParryDensity({(s5 - 1.0) / 2.0}, {(5.0 + 3.0 * s5) / 10.0, (5.0 + s5) / 10.0});
}

std::optional<RenyiParryDensity> RenyiParryDensity::for_multiplier(const Multiplier& alpha) {
  if (alpha.value() == RealConstant::golden_ratio()) return golden();
  return std::nullopt;
}

bool RenyiParryDensity::golden_normalised_exactly() {
  const QuadraticNumber inv_tau(mpq_class(-1, 2), mpq_class(1, 2), 5);
  const QuadraticNumber h1(mpq_class(1, 2), mpq_class(3, 10), 5);
  const QuadraticNumber h2(mpq_class(1, 2), mpq_class(1, 10), 5);
  const QuadraticNumber one = QuadraticNumber::rational(1, 5);
  return inv_tau * h1 + (one - inv_tau) * h2 == one;
}

double RenyiParryDensity::operator()(double x) const {
  const double y = x - std::floor(x);
  const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), y);
  return values_[static_cast<std::size_t>(it - breaks_.begin())];
}

cplx RenyiParryDensity::integrate(const ApFunction& f) const {
  cplx total = 0.0;
  double prev = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    const double end = i < breaks_.size() ? breaks_[i] : 1.0;
    total += values_[i] * avglab::integrate(f, prev, end);
    prev = end;
  }
  return total;
}

PeriodicFunction RenyiParryDensity::as_function() const {
  std::vector<cplx> v(values_.begin(), values_.end());
  return PeriodicFunction::step(breaks_, v);
}

SampleStats sample_stats(std::vector<double> values) {
  if (values.empty()) throw InvalidArgument("statistics of an empty sample");
  std::sort(values.begin(), values.end());
  auto q = [&](double p) {
    const double pos = p * static_cast<double>(values.size() - 1);
    const auto i = static_cast<std::size_t>(std::floor(pos));
    const double frac = pos - static_cast<double>(i);
    if (i + 1 >= values.size()) return values.back();
    return values[i] + frac * (values[i + 1] - values[i]);
  };
  return {q(0.5), q(0.25), q(0.75)};
}

RenyiParryReport renyi_parry_compare(const ApFunction& f, const Multiplier& alpha,
                                     const std::vector<SeedPoint>& x_samples, std::size_t n, double target_error) {
  const auto density = RenyiParryDensity::for_multiplier(alpha);
  if (!density) throw InvalidArgument("no built-in Renyi-Parry density for alpha = " + alpha.to_string());
  if (!periodic_modulo(f, 1.0)) throw InvalidArgument("Renyi-Parry comparison needs a 1-periodic function");
  if (x_samples.empty()) throw InvalidArgument("no x samples");
  RenyiParryReport report;
  report.lebesgue_mean = mean(f).value;
  report.density_integral = density->integrate(f);
  for (const SeedPoint& x : x_samples) {
    const FractionalOrbit e = generate_orbit(alpha, x, n, target_error);
    report.exp_averages.push_back(birkhoff_average(f, e, n).real());
    mpq_class fx = x.value();
    mpz_class fl;
    mpz_fdiv_q(fl.get_mpz_t(), fx.get_num_mpz_t(), fx.get_den_mpz_t());
    fx -= fl;
    const FractionalOrbit b = beta_orbit(alpha, SeedPoint::exact(fx), n, BetaMode::certified, target_error);
    report.beta_averages.push_back(birkhoff_average(f, b, n).real());
  }
  report.exp_stats = sample_stats(report.exp_averages);
  report.beta_stats = sample_stats(report.beta_averages);
  return report;
}

}  // namespace avglab
