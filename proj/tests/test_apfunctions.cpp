#include <cmath>
#include <numbers>
#include <random>

#include "avglab/apfunctions.hpp"
#include "avglab/error.hpp"
#include "doctest.h"

using namespace avglab;

namespace {

constexpr double kTau = 1.6180339887498948482;
constexpr double kPi = std::numbers::pi;

RealConstant rc(const char* s) { return RealConstant::parse(s); }

PeriodicFunction h_tau() {
  return PeriodicFunction::step({1.0 / kTau}, {(5.0 + 3.0 * std::sqrt(5.0)) / 10.0, (5.0 + std::sqrt(5.0)) / 10.0});
}

// int_h^delta a c t^(-a-1) dt by Simpson's rule in u = log t.
double power_variation_oracle(double a, double c, double h, double delta) {
  const int n = 20000;
  const double u0 = std::log(h);
  const double u1 = std::log(delta);
  const double du = (u1 - u0) / n;
  double s = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    s += w * a * c * std::exp(-a * (u0 + i * du));
  }
  return s * du / 3.0;
}

// Measure of [lo, hi] intersected with the union of [k, k + 1/2).
double half_indicator_measure(double lo, double hi) {
  double m = 0.0;
  for (double k = std::floor(lo) - 1; k <= std::ceil(hi) + 1; k += 1.0)
    m += std::max(0.0, std::min(hi, k + 0.5) - std::max(lo, k));
  return m;
}

}  // namespace

TEST_CASE("mean examples") {
  const TrigPolynomial p(2.0, {{rc("1"), 3.0}});
  CHECK(mean(p).value == cplx(2.0, 0.0));
  CHECK(mean(p).error == 0.0);
  const auto frac = SingularPeriodic::frac_power(0.25);
  CHECK(mean(frac).value.real() == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
  CHECK(mean(h_tau()).value.real() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(mean(PeriodicFunction::sine()).value.real() == doctest::Approx(0.0).epsilon(1e-15));
  CHECK_THROWS_AS(mean(p, 4096, 0.0), InvalidArgument);
}

TEST_CASE("golden density integrates to one in Z[sqrt5]") {
  const QuadraticNumber inv_tau(mpq_class(-1, 2), mpq_class(1, 2), 5);
  const QuadraticNumber c1(mpq_class(1, 2), mpq_class(3, 10), 5);
  const QuadraticNumber c2(mpq_class(1, 2), mpq_class(1, 10), 5);
  const QuadraticNumber one = QuadraticNumber::rational(1, 5);
  CHECK(inv_tau * c1 + (one - inv_tau) * c2 == one);
  CHECK(inv_tau * c1 == c2);
}

TEST_CASE("fourier-bohr coefficients") {
  const auto chi = TrigPolynomial::character(rc("sqrt(2)"));
  CHECK(fourier_bohr(chi, rc("sqrt(2)")).value == cplx(1.0, 0.0));
  CHECK(fourier_bohr(chi, rc("1")).value == cplx(0.0, 0.0));
  const TrigPolynomial p(2.0, {{rc("1"), 3.0}});
  CHECK(fourier_bohr(p, rc("0")).value == cplx(2.0, 0.0));
  CHECK(fourier_bohr(p, rc("1")).value == cplx(3.0, 0.0));

  // Closed form for a step function against generic quadrature.
  const auto h = h_tau();
  const PeriodicFunction generic(1.0, [h](double x) { return h(x); }, "h");
  PeriodicFunction marked = generic;
  marked.with_breakpoints({1.0 / kTau});
  for (long k : {1L, 2L, -3L}) {
    const cplx closed = fourier_bohr(h, RealConstant(k)).value;
    const cplx numeric = fourier_bohr(marked, RealConstant(k)).value;
    CHECK(std::abs(closed - numeric) < 1e-12);
  }
  // Non-integer frequency of a 1-periodic function.
  CHECK(fourier_bohr(h, rc("1/2")).value == cplx(0.0, 0.0));

  // <x>^-1/4 at k = 1: int_0^1 x^-1/4 exp(-2 pi i x) dx.
  const auto frac = SingularPeriodic::frac_power(0.25);
  const cplx a1 = fourier_bohr(frac, rc("1")).value;
  // Oracle: substitution x = v^(4/3) and composite Simpson.
  const int n = 200000;
  cplx s = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double v = static_cast<double>(i) / n;
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    const double x = std::pow(v, 4.0 / 3.0);
    s += w * (4.0 / 3.0) * std::exp(cplx(0.0, -2 * kPi * x));
  }
  s /= 3.0 * n;
  CHECK(std::abs(a1 - s) < 1e-9);
}

TEST_CASE("stepanov norm examples") {
  const auto sn = stepanov_norm(TrigPolynomial::sine());
  CHECK(sn.exact);
  CHECK(std::fabs(sn.lower_bound - 2.0 / kPi) < 1e-8);
  CHECK(std::fabs(stepanov_norm(PeriodicFunction::sine()).refined - 2.0 / kPi) < 1e-8);
  CHECK(stepanov_norm(TrigPolynomial(cplx(-3.0, 4.0))).lower_bound == doctest::Approx(5.0).epsilon(1e-14));
  CHECK(stepanov_norm(SingularPeriodic::frac_power(0.25)).lower_bound == doctest::Approx(4.0 / 3.0).epsilon(1e-10));

  // Bumps on Z seen as a non-periodic Stepanov function.
  const StepanovFunction st(UniformlyDiscreteSet::integers(), 0.25, 1.0, 0.5);
  const auto grid = stepanov_norm(st, 1.0 / 8, 2.0);
  CHECK_FALSE(grid.exact);
  const double window = 2.0 * std::pow(0.5, 0.75) * (0.25 / 0.75);
  CHECK(grid.lower_bound == doctest::Approx(window).epsilon(1e-9));
  CHECK(grid.refined >= grid.lower_bound);
  CHECK_THROWS_AS(stepanov_norm(st, 0.0), InvalidArgument);
}

TEST_CASE("mollifier examples") {
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  const ApFunction m4 = mollify(TrigPolynomial::sine(), 0.25);
  const ApFunction m4p = mollify(PeriodicFunction::sine(), 0.25);
  const ApFunction m2 = mollify(TrigPolynomial::sine(), 0.5);
  double worst = 0.0;
  double worst_p = 0.0;
  double worst_zero = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double x = u(gen);
    const double want = 2.0 / kPi * std::sin(2 * kPi * x);
    worst = std::max(worst, std::abs(evaluate(m4, x) - want));
    if (i < 100) worst_p = std::max(worst_p, std::abs(evaluate(m4p, x) - want));
    worst_zero = std::max(worst_zero, std::abs(evaluate(m2, x)));
  }
  CHECK(worst < 1e-10);
  CHECK(worst_p < 1e-10);
  CHECK(worst_zero < 1e-15);
  CHECK(evaluate(mollify(TrigPolynomial(1.5), 0.3), 0.7) == cplx(1.5, 0.0));

  const ApFunction ind = mollify(PeriodicFunction::indicator(0.0, 0.5), 0.1);
  for (double x : {0.0, 0.05, 0.45, 0.52, 0.97, 3.333}) {
    const double want = half_indicator_measure(x - 0.1, x + 0.1) / 0.2;
    CHECK(evaluate(ind, x).real() == doctest::Approx(want).epsilon(1e-12));
  }
  CHECK_THROWS_AS(mollify(TrigPolynomial(1.0), 0.0), InvalidArgument);
}

TEST_CASE("mollifier converges in the Stepanov norm") {
  const ApFunction f = PeriodicFunction::indicator(0.0, 0.5);
  double prev = INFINITY;
  for (double delta : {1.0 / 4, 1.0 / 16, 1.0 / 64}) {
    const double norm = stepanov_norm(subtract(f, mollify(f, delta))).lower_bound;
    // Two jumps, each contributing a triangle pair of area delta/2.
    CHECK(norm == doctest::Approx(delta).epsilon(1e-6));
    CHECK(norm < prev);
    prev = norm;
  }
}

TEST_CASE("almost-period transfer to the mollified function") {
  const ApFunction f = TrigPolynomial(0.0, {{rc("1"), 1.0}, {rc("sqrt(2)"), 0.5}});
  const double t = 70.0;  // 70 sqrt2 is within 0.005 of an integer
  const ApFunction shifted = ContinuousFunction([f, t](double x) { return evaluate(f, x + t); }, "shift");
  const double norm = stepanov_norm(subtract(f, shifted), 1.0 / 64, 4.0).refined;
  const double delta = 0.25;
  const double eps = norm / (2 * delta) * 1.01;
  const ApFunction fd = mollify(f, delta);
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(0.0, 4.0);
  double worst = 0.0;
  for (int i = 0; i < 500; ++i) {
    const double x = u(gen);
    worst = std::max(worst, std::abs(evaluate(fd, x + t) - evaluate(fd, x)));
  }
  CHECK(norm < 0.05);
  CHECK(worst < eps);
}

TEST_CASE("variation examples") {
  const auto sym = SingularPeriodic::symmetric_power(0.0, 0.25, 1.0, 0.5);
  const double v = variation_V_N(sym, 0.0, 1.0, 1e4);
  CHECK(v == doctest::Approx(2.0 * (10.0 - std::pow(2.0, 0.25))).epsilon(1e-12));
  CHECK(v == doctest::Approx(17.6216).epsilon(1e-5));
  const double base = 2.0 * std::pow(2.0, 0.25);
  CHECK(variation_V_N(sym, 0.0, 1.0, 16e4) + base == doctest::Approx(2.0 * (v + base)).epsilon(1e-12));
  CHECK_THROWS_AS(variation_V_N(sym, 0.0, 1.0, 1.5), InvalidArgument);
  CHECK_THROWS_AS(variation_V_N(sym, 0.0, 0.05, 2.0), InvalidArgument);
  CHECK_THROWS_AS(variation_V_N(sym, 0.3, 1.0, 100.0), InvalidArgument);

  // Window declared without a singularity, smooth remainder sin(2 pi x).
  const SingularPeriodic smooth({{0.0, 0.25, 0.0, 0.0, 0.25}}, PeriodicFunction::sine());
  const double m = 2 * kPi;
  double prev = 0.0;
  for (double n : {1e2, 1e4, 1e6}) {
    const double vs = variation_V_N(smooth, 0.0, 1.0, n);
    CHECK(vs <= 2.0 * m * 0.25);
    CHECK(vs >= prev);
    prev = vs;
  }
  CHECK(prev == doctest::Approx(2.0 * std::sin(2 * kPi * 0.25)).epsilon(1e-5));
}

TEST_CASE("variation closed form against quadrature") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> ua(0.01, 0.49);
  std::uniform_real_distribution<double> ud(0.05, 0.5);
  std::uniform_real_distribution<double> us(0.2, 2.0);
  std::uniform_real_distribution<double> uc(-2.0, 2.0);
  std::uniform_real_distribution<double> ulog(0.5, 6.0);
  int checked = 0;
  while (checked < 50) {
    const double a = ua(gen);
    const double delta = ud(gen);
    const double s = us(gen);
    const double n = std::floor(std::pow(10.0, ulog(gen)));
    const double cl = uc(gen);
    const double cr = uc(gen);
    const double h = std::pow(n, -s);
    if (n < 2 || h >= delta) continue;
    const SingularPeriodic f({{0.3, a, cl, cr, delta}});
    const double closed = variation_V_N(f, 0.3, s, n);
    const double oracle = power_variation_oracle(a, std::fabs(cl), h, delta) + power_variation_oracle(a, std::fabs(cr), h, delta);
    CHECK(closed == doctest::Approx(oracle).epsilon(1e-8));
    ++checked;
  }
}

TEST_CASE("bohr truncation") {
  const auto g = BohrSeries::geometric(10);
  const auto t2 = truncate_bohr(g, 2);
  CHECK(t2.poly.terms().size() == 2);
  CHECK(t2.tail == 0.5);
  CHECK(truncate_bohr(g, 0).tail == 2.0);
  CHECK(truncate_bohr(g, 0).poly.terms().empty());
  const BohrSeries finite(0.0, {{rc("1"), 1.0}, {rc("sqrt(2)"), 0.5}, {rc("tau"), 0.25}});
  CHECK(truncate_bohr(finite, 3).tail == 0.0);
  CHECK(truncate_bohr(finite, 0).tail == 1.75);
  CHECK_THROWS_AS(truncate_bohr(finite, 4), InvalidArgument);
  double prev = INFINITY;
  for (std::size_t m = 0; m <= g.size(); ++m) {
    CHECK(g.tail(m) <= prev);
    prev = g.tail(m);
  }
  CHECK(g.terms()[2].k == RealConstant::golden_ratio());
  CHECK(g.terms()[4].k == rc("sqrt(5)"));
  for (std::size_t m = 0; m <= g.size(); ++m)
    for (std::size_t m2 = 0; m2 <= g.size(); ++m2) {
      const cplx d = mean(truncate_bohr(g, m).poly).value - mean(truncate_bohr(g, m2).poly).value;
      CHECK(std::abs(d) <= g.tail(std::min(m, m2)));
    }
  // Uniform distance between truncations is bounded by the tail.
  for (double x : {0.1, 7.3, -42.0, 1e4 + 0.3}) {
    CHECK(std::abs(evaluate(g, x) - truncate_bohr(g, 3).poly(x)) <= g.tail(3) + 1e-15);
  }
  CHECK_THROWS_AS(BohrSeries(0.0, {{rc("1"), 1.0}, {rc("1"), 1.0}}), InvalidArgument);
  CHECK_THROWS_AS(TrigPolynomial(0.0, {{rc("0"), 1.0}}), InvalidArgument);
}

TEST_CASE("periodic classes") {
  const auto h = h_tau();
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  for (int i = 0; i < 200; ++i) {
    const double x = u(gen);
    CHECK(h(x + 1.0) == h(x));
  }
  CHECK(h.integral(-2.0, 3.0).real() == doctest::Approx(5.0).epsilon(1e-13));
  CHECK(PeriodicFunction::indicator(0.25, 0.5).integral(0.0, 10.0).real() == doctest::Approx(2.5).epsilon(1e-14));
  CHECK_THROWS_AS(PeriodicFunction::step({0.5, 0.2}, {1, 2, 3}), InvalidArgument);
  CHECK_THROWS_AS(PeriodicFunction::step({0.5}, {1.0}), InvalidArgument);

  const auto frac = SingularPeriodic::frac_power(0.25);
  CHECK(frac(0.5).real() == doctest::Approx(std::pow(0.5, -0.25)).epsilon(1e-15));
  CHECK(frac(-0.5).real() == doctest::Approx(std::pow(0.5, -0.25)).epsilon(1e-15));
  CHECK(frac.integral(0.0, 3.0).real() == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(frac.integral(0.0, 0.5).real() == doctest::Approx(4.0 / 3.0 * std::pow(0.5, 0.75)).epsilon(1e-14));
  const auto sym = SingularPeriodic::symmetric_power(0.9, 0.25, 2.0, 0.2);
  CHECK(sym(0.8).real() == doctest::Approx(2.0 * std::pow(0.1, -0.25)).epsilon(1e-12));
  CHECK(sym(1.05).real() == doctest::Approx(2.0 * std::pow(0.15, -0.25)).epsilon(1e-12));
  CHECK(sym(0.5).real() == 0.0);
  CHECK(sym.mean().real() == doctest::Approx(2.0 * 2.0 * 4.0 / 3.0 * std::pow(0.2, 0.75)).epsilon(1e-13));
  CHECK(sym.integral(0.3, 1.4).real() == doctest::Approx(sym.mean().real()).epsilon(1e-13));

  CHECK_THROWS_AS(SingularPeriodic::symmetric_power(0.0, 0.6, 1.0, 0.5), InvalidArgument);
  CHECK_THROWS_AS(SingularPeriodic({{0.0, 0.25, 1, 1, 0.3}, {0.5, 0.25, 1, 1, 0.3}}), InvalidArgument);
}

TEST_CASE("stepanov functions") {
  const StepanovFunction st(UniformlyDiscreteSet::integers(), 0.25, 1.0, 0.5, TrigPolynomial(1.0));
  const double bump_mean = 2.0 * std::pow(0.5, 0.75) * 0.25 / 0.75;
  CHECK(st.density_mean().real() == doctest::Approx(1.0 + bump_mean).epsilon(1e-14));
  CHECK(st.integral(0.0, 100.0).real() == doctest::Approx(100.0 * (1.0 + bump_mean)).epsilon(1e-12));
  CHECK(st(3.25).real() == doctest::Approx(1.0 + std::pow(0.25, -0.25) - std::pow(0.5, -0.25)).epsilon(1e-14));
  CHECK(st(3.5).real() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(StepanovFunction(UniformlyDiscreteSet::integers(), 0.25, 1.0, 0.6), InvalidArgument);

  const auto beatty = UniformlyDiscreteSet::beatty(rc("sqrt(2)"));
  const StepanovFunction sb(beatty, 0.25, 1.0, 0.5);
  const auto m = mean(sb, 4096.0, 1e-3);
  CHECK(std::abs(m.value - sb.density_mean()) < 2e-3);
  CHECK(variation_V_N(sb, 1.0, 1.0, 1e4) == doctest::Approx(2.0 * (10.0 - std::pow(2.0, 0.25))).epsilon(1e-12));
  CHECK_THROWS_AS(variation_V_N(sb, 1.5, 1.0, 1e4), InvalidArgument);
}

TEST_CASE("high precision evaluation") {
  const mpfr_bits p = 256;
  BigFloat x = BigFloat::from_mpz(mpz_class(1) << 70, p) + BigFloat::from_double(0.25, p);
  const ApFunction chi = TrigPolynomial::character(rc("1"));
  const cplx v = BigEvaluator(chi, p)(x);
  CHECK(std::abs(v - cplx(0.0, 1.0)) < 1e-15);
  const ApFunction h = h_tau();
  CHECK(BigEvaluator(h, p)(x) == evaluate(h, 0.25));
  const ApFunction st = StepanovFunction(UniformlyDiscreteSet::integers(), 0.25, 1.0, 0.5);
  CHECK(BigEvaluator(st, p)(x).real() == doctest::Approx(std::pow(0.25, -0.25) - std::pow(0.5, -0.25)).epsilon(1e-14));
  // sqrt2 * 2^70 needs far more than double precision.
  const ApFunction c2 = TrigPolynomial::character(rc("sqrt(2)"));
  BigFloat k = rc("sqrt(2)").to_bigfloat(512);
  BigFloat kx = k * x;
  const cplx want = std::polar(1.0, 2 * kPi * kx.frac().to_double());
  CHECK(std::abs(BigEvaluator(c2, p)(x) - want) < 1e-12);
}
