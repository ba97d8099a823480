#include "avglab/apfunctions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "avglab/error.hpp"
#include "avglab/format.hpp"
#include "quadrature.hpp"

namespace avglab {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double frac(double x) { return x - std::floor(x); }

// exp(2 pi i theta), reduced first so large arguments keep their phase.
cplx character_at(double theta) {
  const double r = frac(theta);
  return {std::cos(kTwoPi * r), std::sin(kTwoPi * r)};
}

std::vector<double> frequencies_of(const std::vector<TrigTerm>& terms) {
  std::vector<double> k;
  k.reserve(terms.size());
  for (const TrigTerm& t : terms) k.push_back(t.k.to_double());
  return k;
}

void check_frequencies(const std::vector<TrigTerm>& terms) {
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (terms[i].k == RealConstant(0L)) throw InvalidArgument("frequencies must be non-zero");
    for (std::size_t j = 0; j < i; ++j)
      if (terms[i].k == terms[j].k) throw InvalidArgument("frequencies must be distinct: " + terms[i].k.to_string());
  }
}

cplx trig_value(cplx a0, const std::vector<TrigTerm>& terms, const std::vector<double>& k, double x) {
  cplx s = a0;
  for (std::size_t i = 0; i < terms.size(); ++i) s += terms[i].a * character_at(k[i] * x);
  return s;
}

cplx trig_integral(cplx a0, const std::vector<TrigTerm>& terms, const std::vector<double>& k, double lo, double hi) {
  cplx s = a0 * (hi - lo);
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const cplx step = character_at(k[i] * hi) - character_at(k[i] * lo);
    s += terms[i].a * step / cplx(0.0, kTwoPi * k[i]);
  }
  return s;
}

// Smallest L > 0 with k L an integer for every k; nullopt unless all rational.
std::optional<double> common_period(const std::vector<TrigTerm>& terms) {
  if (terms.empty()) return 1.0;
  mpz_class num_gcd = 0;
  mpz_class den_lcm = 1;
  for (const TrigTerm& t : terms) {
    if (!t.k.is_rational()) return std::nullopt;
    const mpq_class& q = t.k.rational();
    mpz_class n = abs(q.get_num());
    mpz_gcd(num_gcd.get_mpz_t(), num_gcd.get_mpz_t(), n.get_mpz_t());
    mpz_lcm(den_lcm.get_mpz_t(), den_lcm.get_mpz_t(), q.get_den().get_mpz_t());
  }
  return mpq_class(den_lcm, num_gcd).get_d();
}

std::string complex_text(cplx z) {
  return "[" + json_number(z.real()) + "," + json_number(z.imag()) + "]";
}

std::string terms_text(cplx a0, const std::vector<TrigTerm>& terms) {
  std::string s = "\"a0\":" + complex_text(a0) + ",\"terms\":[";
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (i) s += ",";
    s += "{\"k\":" + json_string(terms[i].k.to_string()) + ",\"a\":" + complex_text(terms[i].a) + "}";
  }
  return s + "]";
}

double pow_primitive(double t, double a) { return std::pow(t, 1.0 - a) / (1.0 - a); }

}  // namespace

// ---------------------------------------------------------------------------

TrigPolynomial::TrigPolynomial(cplx a0, std::vector<TrigTerm> terms) : a0_(a0), terms_(std::move(terms)) {
  check_frequencies(terms_);
  k_ = frequencies_of(terms_);
}

TrigPolynomial TrigPolynomial::sine(long m) {
  if (m == 0) throw InvalidArgument("sine frequency must be non-zero");
  return TrigPolynomial(0.0, {{RealConstant(m), cplx(0.0, -0.5)}, {RealConstant(-m), cplx(0.0, 0.5)}});
}

TrigPolynomial TrigPolynomial::cosine(long m) {
  if (m == 0) throw InvalidArgument("cosine frequency must be non-zero");
  return TrigPolynomial(0.0, {{RealConstant(m), 0.5}, {RealConstant(-m), 0.5}});
}

TrigPolynomial TrigPolynomial::character(RealConstant k) {
  if (k == RealConstant(0L)) return TrigPolynomial(1.0);
  return TrigPolynomial(0.0, {{std::move(k), 1.0}});
}

cplx TrigPolynomial::operator()(double x) const { return trig_value(a0_, terms_, k_, x); }

cplx TrigPolynomial::derivative(double x) const {
  cplx s = 0.0;
  for (std::size_t i = 0; i < terms_.size(); ++i) s += terms_[i].a * cplx(0.0, kTwoPi * k_[i]) * character_at(k_[i] * x);
  return s;
}

cplx TrigPolynomial::integral(double lo, double hi) const { return trig_integral(a0_, terms_, k_, lo, hi); }

bool TrigPolynomial::one_periodic() const {
  return std::all_of(terms_.begin(), terms_.end(), [](const TrigTerm& t) { return t.k.is_integer(); });
}

double TrigPolynomial::sup_bound() const {
  double s = std::abs(a0_);
  for (const TrigTerm& t : terms_) s += std::abs(t.a);
  return s;
}

// ---------------------------------------------------------------------------

PeriodicFunction::PeriodicFunction(double period, Eval f, std::string description, Integrability integrability)
    : period_(period), f_(std::move(f)), description_(std::move(description)), integrability_(integrability) {
  if (!(period > 0.0) || !std::isfinite(period)) throw InvalidArgument("period must be positive and finite");
  if (!f_) throw InvalidArgument("periodic function needs an evaluator");
  full_period_ = period_integral(period_);
}

PeriodicFunction PeriodicFunction::step(std::vector<double> breaks, std::vector<cplx> values) {
  if (values.size() != breaks.size() + 1) throw InvalidArgument("step function needs one more value than breaks");
  for (std::size_t i = 0; i < breaks.size(); ++i) {
    if (!(breaks[i] > 0.0 && breaks[i] < 1.0)) throw InvalidArgument("step breaks must lie in (0,1)");
    if (i > 0 && !(breaks[i] > breaks[i - 1])) throw InvalidArgument("step breaks must increase");
  }
  auto eval = [breaks, values](double x) {
    const auto it = std::upper_bound(breaks.begin(), breaks.end(), x);
    return values[static_cast<std::size_t>(it - breaks.begin())];
  };
  std::string text = "{\"type\":\"step\",\"breaks\":[";
  for (std::size_t i = 0; i < breaks.size(); ++i) text += (i ? "," : "") + json_number(breaks[i]);
  text += "],\"values\":[";
  for (std::size_t i = 0; i < values.size(); ++i) text += (i ? "," : "") + complex_text(values[i]);
  text += "]}";
  double sup = 0.0;
  for (cplx v : values) sup = std::max(sup, std::abs(v));
  PeriodicFunction f(1.0, eval, text);
  f.breakpoints_ = breaks;
  f.step_values_ = values;
  f.sup_bound_ = sup;
  f.full_period_ = f.period_integral(1.0);
  return f;
}

PeriodicFunction PeriodicFunction::indicator(double lo, double hi) {
  if (!(lo >= 0.0 && lo < hi && hi <= 1.0)) throw InvalidArgument("indicator needs 0 <= lo < hi <= 1");
  std::vector<double> breaks;
  std::vector<cplx> values;
  if (lo > 0.0) {
    breaks.push_back(lo);
    values.push_back(0.0);
  }
  values.push_back(1.0);
  if (hi < 1.0) {
    breaks.push_back(hi);
    values.push_back(0.0);
  }
  return step(std::move(breaks), std::move(values));
}

PeriodicFunction PeriodicFunction::sine() {
  PeriodicFunction f(1.0, [](double x) { return cplx(std::sin(kTwoPi * x)); }, "{\"type\":\"sine\"}");
  f.with_antiderivative([](double y) { return cplx((1.0 - std::cos(kTwoPi * y)) / kTwoPi); })
      .with_derivative([](double x) { return cplx(kTwoPi * std::cos(kTwoPi * x)); })
      .with_sup_bound(1.0);
  return f;
}

PeriodicFunction& PeriodicFunction::with_antiderivative(Eval primitive) {
  primitive_ = std::move(primitive);
  full_period_ = period_integral(period_);
  return *this;
}

PeriodicFunction& PeriodicFunction::with_derivative(Eval derivative) {
  derivative_ = std::move(derivative);
  return *this;
}

PeriodicFunction& PeriodicFunction::with_breakpoints(std::vector<double> points) {
  std::sort(points.begin(), points.end());
  breakpoints_ = std::move(points);
  if (!primitive_ && step_values_.empty()) full_period_ = period_integral(period_);
  return *this;
}

PeriodicFunction& PeriodicFunction::with_sup_bound(double bound) {
  sup_bound_ = bound;
  return *this;
}

cplx PeriodicFunction::operator()(double x) const {
  double y = x - period_ * std::floor(x / period_);
  if (y >= period_) y -= period_;
  if (y < 0.0) y = 0.0;
  return f_(y);
}

cplx PeriodicFunction::derivative(double x) const {
  if (!derivative_) throw InvalidArgument("no derivative for " + description_);
  return derivative_(x - period_ * std::floor(x / period_));
}

cplx PeriodicFunction::period_integral(double y) const {
  if (y <= 0.0) return 0.0;
  if (primitive_) return primitive_(y) - primitive_(0.0);
  if (!step_values_.empty()) {
    cplx s = 0.0;
    double prev = 0.0;
    for (std::size_t i = 0; i <= breakpoints_.size(); ++i) {
      const double end = i < breakpoints_.size() ? breakpoints_[i] : 1.0;
      const double hi = std::min(end, y);
      if (hi > prev) s += step_values_[i] * (hi - prev);
      if (end >= y) break;
      prev = end;
    }
    return s;
  }
  std::vector<quad::Mark> marks;
  for (double b : breakpoints_) marks.push_back({b, 0.0});
  return quad::integrate_marked([this](double x) { return f_(x); }, 0.0, y, marks, 1e-13);
}

cplx PeriodicFunction::integral(double lo, double hi) const {
  auto cumulative = [this](double x) {
    const double periods = std::floor(x / period_);
    double y = x - periods * period_;
    y = std::clamp(y, 0.0, period_);
    return periods * full_period_ + period_integral(y);
  };
  return cumulative(hi) - cumulative(lo);
}

// ---------------------------------------------------------------------------

SingularPeriodic::SingularPeriodic(std::vector<Singularity> singularities, std::optional<PeriodicFunction> remainder)
    : singularities_(std::move(singularities)), remainder_(std::move(remainder)) {
  for (Singularity& s : singularities_) {
    s.z = frac(s.z);
    const bool active = s.c_left != 0.0 || s.c_right != 0.0;
    if (active && !(s.a > 0.0 && s.a < 0.5)) throw InvalidArgument("singularity exponent must lie in (0, 1/2)");
    if (!(s.delta > 0.0 && s.delta <= 1.0)) throw InvalidArgument("singularity half-width must lie in (0, 1]");
    if (s.c_left != 0.0 && s.c_right != 0.0 && s.delta > 0.5)
      throw InvalidArgument("two-sided singularity needs half-width <= 1/2");
  }
  for (std::size_t i = 0; i < singularities_.size(); ++i)
    for (std::size_t j = 0; j < i; ++j) {
      const double d = std::fabs(singularities_[i].z - singularities_[j].z);
      if (std::min(d, 1.0 - d) < singularities_[i].delta + singularities_[j].delta)
        throw InvalidArgument("singularity windows overlap modulo 1");
    }
  if (remainder_ && std::fabs(remainder_->period() - 1.0) > 0.0)
    throw InvalidArgument("remainder of a singular periodic function must have period 1");
  model_mean_ = model_primitive(1.0);
}

SingularPeriodic SingularPeriodic::frac_power(double a) { return SingularPeriodic({{0.0, a, 0.0, 1.0, 1.0}}); }

SingularPeriodic SingularPeriodic::symmetric_power(double z, double a, double c, double delta) {
  return SingularPeriodic({{z, a, c, c, delta}});
}

cplx SingularPeriodic::operator()(double x) const {
  const double y = frac(x);
  double v = 0.0;
  for (const Singularity& s : singularities_) {
    const double tr = frac(y - s.z);
    const double tl = frac(s.z - y);
    if (s.c_right != 0.0 && tr < s.delta) v += tr == 0.0 ? INFINITY : s.c_right * std::pow(tr, -s.a);
    if (s.c_left != 0.0 && tl < s.delta) v += tl == 0.0 ? INFINITY : s.c_left * std::pow(tl, -s.a);
  }
  cplx out = v;
  if (remainder_) out += (*remainder_)(y);
  return out;
}

double SingularPeriodic::model_derivative(double x) const {
  const double y = frac(x);
  double v = 0.0;
  for (const Singularity& s : singularities_) {
    const double tr = frac(y - s.z);
    const double tl = frac(s.z - y);
    if (s.c_right != 0.0 && tr > 0.0 && tr < s.delta) v -= s.a * s.c_right * std::pow(tr, -s.a - 1.0);
    if (s.c_left != 0.0 && tl > 0.0 && tl < s.delta) v += s.a * s.c_left * std::pow(tl, -s.a - 1.0);
  }
  return v;
}

double SingularPeriodic::model_primitive(double y) const {
  double total = 0.0;
  for (const Singularity& s : singularities_) {
    if (s.c_right != 0.0) {
      for (int k = -1; k <= 0; ++k) {
        const double p = s.z + k;
        const double lo = std::max(0.0, p);
        const double hi = std::min(y, p + s.delta);
        if (hi > lo) total += s.c_right * (pow_primitive(hi - p, s.a) - pow_primitive(lo - p, s.a));
      }
    }
    if (s.c_left != 0.0) {
      for (int k = 0; k <= 1; ++k) {
        const double p = s.z + k;
        const double lo = std::max(0.0, p - s.delta);
        const double hi = std::min(y, p);
        if (hi > lo) total += s.c_left * (pow_primitive(p - lo, s.a) - pow_primitive(p - hi, s.a));
      }
    }
  }
  return total;
}

cplx SingularPeriodic::integral(double lo, double hi) const {
  const cplx full = mean();
  auto cumulative = [&](double x) {
    const double k = std::floor(x);
    const double y = x - k;
    cplx v = k * full + model_primitive(y);
    if (remainder_) v += remainder_->integral(0.0, y);
    return v;
  };
  return cumulative(hi) - cumulative(lo);
}

cplx SingularPeriodic::mean() const {
  cplx m = model_mean_;
  if (remainder_) m += remainder_->integral(0.0, 1.0);
  return m;
}

std::string SingularPeriodic::description() const {
  std::string s = "{\"type\":\"singular\",\"singularities\":[";
  for (std::size_t i = 0; i < singularities_.size(); ++i) {
    const Singularity& z = singularities_[i];
    s += (i ? "," : "");
    s += "{\"z\":" + json_number(z.z) + ",\"a\":" + json_number(z.a) + ",\"c_left\":" + json_number(z.c_left) +
         ",\"c_right\":" + json_number(z.c_right) + ",\"delta\":" + json_number(z.delta) + "}";
  }
  s += "]";
  if (remainder_) s += ",\"remainder\":" + remainder_->description();
  return s + "}";
}

// ---------------------------------------------------------------------------

BohrSeries::BohrSeries(cplx a0, std::vector<TrigTerm> terms, double extra_tail)
    : a0_(a0), terms_(std::move(terms)), extra_tail_(extra_tail) {
  check_frequencies(terms_);
  if (!(extra_tail >= 0.0) || !std::isfinite(extra_tail)) throw InvalidArgument("tail certificate must be finite");
  k_ = frequencies_of(terms_);
  suffix_.assign(terms_.size() + 1, 0.0);
  for (std::size_t i = terms_.size(); i-- > 0;) suffix_[i] = suffix_[i + 1] + std::abs(terms_[i].a);
}

BohrSeries BohrSeries::geometric(std::size_t count) {
  std::vector<RealConstant> freqs{RealConstant(1L), RealConstant(QuadraticNumber(0, 1, 2)), RealConstant::golden_ratio()};
  for (unsigned long d = 3; freqs.size() < count; ++d)
    if (is_square_free(d)) freqs.emplace_back(QuadraticNumber(0, 1, d));
  std::vector<TrigTerm> terms;
  for (std::size_t l = 1; l <= count; ++l) terms.push_back({freqs[l - 1], std::ldexp(1.0, 1 - static_cast<int>(l))});
  return BohrSeries(0.0, std::move(terms), std::ldexp(1.0, 1 - static_cast<int>(count)));
}

double BohrSeries::tail(std::size_t m) const {
  if (m > terms_.size()) throw InvalidArgument("truncation order exceeds the stored terms");
  return suffix_[m] + extra_tail_;
}

TruncatedBohr BohrSeries::truncate(std::size_t m) const {
  const double t = tail(m);
  return {TrigPolynomial(a0_, std::vector<TrigTerm>(terms_.begin(), terms_.begin() + static_cast<long>(m))), t};
}

cplx BohrSeries::operator()(double x) const { return trig_value(a0_, terms_, k_, x); }

cplx BohrSeries::integral(double lo, double hi) const { return trig_integral(a0_, terms_, k_, lo, hi); }

// ---------------------------------------------------------------------------

StepanovFunction::StepanovFunction(UniformlyDiscreteSet y, double a, double c, double radius, TrigPolynomial smooth)
    : y_(std::move(y)), a_(a), c_(c), r_(radius), smooth_(std::move(smooth)) {
  if (!(a > 0.0 && a < 0.5)) throw InvalidArgument("singularity exponent must lie in (0, 1/2)");
  if (!(radius > 0.0 && radius <= 0.5 * y_.min_gap()))
    throw InvalidArgument("radius must lie in (0, min_gap/2]");
}

double StepanovFunction::bump(double t) const {
  const double u = std::fabs(t);
  if (u >= r_) return 0.0;
  if (u == 0.0) return c_ == 0.0 ? 0.0 : INFINITY;
  return c_ * (std::pow(u, -a_) - std::pow(r_, -a_));
}

cplx StepanovFunction::operator()(double x) const { return smooth_(x) + bump(y_.offset(x)); }

double StepanovFunction::bump_integral(double t0, double t1) const {
  t0 = std::clamp(t0, -r_, r_);
  t1 = std::clamp(t1, -r_, r_);
  auto prim = [this](double t) {
    const double u = std::fabs(t);
    return std::copysign(pow_primitive(u, a_), t) - std::pow(r_, -a_) * t;
  };
  return c_ * (prim(t1) - prim(t0));
}

cplx StepanovFunction::integral(double lo, double hi) const {
  cplx s = smooth_.integral(lo, hi);
  double bumps = 0.0;
  for (double y : y_.points_in(lo - r_, hi + r_)) bumps += bump_integral(lo - y, hi - y);
  return s + bumps;
}

cplx StepanovFunction::density_mean() const {
  return smooth_.a0() + c_ * y_.density() * 2.0 * std::pow(r_, 1.0 - a_) * a_ / (1.0 - a_);
}

std::string StepanovFunction::description() const {
  return "{\"type\":\"stepanov\",\"set\":" + json_string(y_.describe()) + ",\"a\":" + json_number(a_) +
         ",\"c\":" + json_number(c_) + ",\"radius\":" + json_number(r_) + ",\"smooth\":{" +
         terms_text(smooth_.a0(), smooth_.terms()) + "}}";
}

ContinuousFunction::ContinuousFunction(std::function<cplx(double)> f, std::string description, std::optional<double> sup)
    : f_(std::move(f)), description_(std::move(description)), sup_(sup) {}

// ---------------------------------------------------------------------------

cplx evaluate(const ApFunction& f, double x) {
  return std::visit([x](const auto& g) -> cplx { return g(x); }, f);
}

std::string describe(const ApFunction& f) {
  return std::visit(
      [](const auto& g) -> std::string {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, TrigPolynomial>)
          return "{\"type\":\"trigpoly\"," + terms_text(g.a0(), g.terms()) + "}";
        else if constexpr (std::is_same_v<T, BohrSeries>)
          return "{\"type\":\"bohr\"," + terms_text(g.a0(), g.terms()) + ",\"extra_tail\":" +
                 json_number(g.extra_tail()) + "}";
        else
          return g.description();
      },
      f);
}

std::optional<double> period_of(const ApFunction& f) {
  if (const auto* t = std::get_if<TrigPolynomial>(&f)) return common_period(t->terms());
  if (const auto* b = std::get_if<BohrSeries>(&f)) {
    if (b->extra_tail() > 0.0) return std::nullopt;
    return common_period(b->terms());
  }
  if (const auto* p = std::get_if<PeriodicFunction>(&f)) return p->period();
  if (std::holds_alternative<SingularPeriodic>(f)) return 1.0;
  return std::nullopt;
}

// ---------------------------------------------------------------------------

BigEvaluator::BigEvaluator(const ApFunction& f, mpfr_bits precision) : f_(&f), precision_(precision) {
  const std::vector<TrigTerm>* terms = nullptr;
  if (const auto* t = std::get_if<TrigPolynomial>(&f)) {
    terms = &t->terms();
    a0_ = t->a0();
  } else if (const auto* b = std::get_if<BohrSeries>(&f)) {
    terms = &b->terms();
    a0_ = b->a0();
  } else if (const auto* s = std::get_if<StepanovFunction>(&f)) {
    terms = &s->smooth().terms();
    a0_ = s->smooth().a0();
  }
  if (terms) {
    for (const TrigTerm& t : *terms) {
      freqs_.push_back(t.k.to_bigfloat(precision_));
      coefs_.push_back(t.a);
    }
  }
}

cplx BigEvaluator::operator()(const BigFloat& x) const {
  auto trig_part = [&]() {
    cplx s = a0_;
    for (std::size_t i = 0; i < freqs_.size(); ++i) {
      BigFloat kx = freqs_[i] * x;
      s += coefs_[i] * character_at(kx.frac().to_double());
    }
    return s;
  };
  return std::visit(
      [&](const auto& g) -> cplx {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, TrigPolynomial> || std::is_same_v<T, BohrSeries>) {
          return trig_part();
        } else if constexpr (std::is_same_v<T, StepanovFunction>) {
          return trig_part() + g.bump(g.set().offset(x).to_double());
        } else if constexpr (std::is_same_v<T, PeriodicFunction>) {
          const mpfr_bits p = std::max(precision_, x.precision());
          const BigFloat period = BigFloat::from_double(g.period(), p);
          BigFloat wide(p);
          mpfr_set(wide.raw(), x.raw(), MPFR_RNDN);
          const BigFloat y = (wide / period).frac() * period;
          return g(y.to_double());
        } else if constexpr (std::is_same_v<T, SingularPeriodic>) {
          return g(x.frac().to_double());
        } else {
          const double v = x.to_double();
          if (!(std::fabs(v) < 0x1p52)) throw InvalidArgument("argument too large for " + g.description());
          return g(v);
        }
      },
      *f_);
}

// ---------------------------------------------------------------------------

namespace {

// Marks for quadrature of f (or |f|) over [lo, hi].
std::vector<quad::Mark> marks_of(const ApFunction& f, double lo, double hi) {
  std::vector<quad::Mark> marks;
  auto periodic_marks = [&](const std::vector<double>& points, double period, double exponent) {
    const double k0 = std::floor(lo / period) - 1.0;
    const double k1 = std::floor(hi / period) + 1.0;
    if (k1 - k0 > 1e6) return;
    for (double k = k0; k <= k1; k += 1.0)
      for (double p : points) {
        const double x = p + k * period;
        if (x >= lo && x <= hi) marks.push_back({x, exponent});
      }
  };
  if (const auto* p = std::get_if<PeriodicFunction>(&f)) {
    std::vector<double> pts = p->breakpoints();
    pts.push_back(0.0);
    periodic_marks(pts, p->period(), 0.0);
  } else if (const auto* s = std::get_if<SingularPeriodic>(&f)) {
    for (const Singularity& z : s->singularities()) {
      periodic_marks({z.z}, 1.0, z.c_left != 0.0 || z.c_right != 0.0 ? z.a : 0.0);
      periodic_marks({z.z - z.delta, z.z + z.delta}, 1.0, 0.0);
    }
    if (s->remainder()) periodic_marks(s->remainder()->breakpoints(), 1.0, 0.0);
  } else if (const auto* st = std::get_if<StepanovFunction>(&f)) {
    const double r = st->radius();
    for (double y : st->set().points_in(lo - r, hi + r)) {
      for (double x : {y - r, y + r})
        if (x >= lo && x <= hi) marks.push_back({x, 0.0});
      if (y >= lo && y <= hi) marks.push_back({y, st->coefficient() != 0.0 ? st->exponent() : 0.0});
    }
  }
  return marks;
}

cplx quadrature(const ApFunction& f, const std::function<cplx(double)>& g, double lo, double hi, double tolerance) {
  // Unit cells keep each Gauss-Kronrod call local.
  cplx total = 0.0;
  for (double a = lo; a < hi;) {
    const double b = std::min(hi, std::floor(a) + 1.0);
    total += quad::integrate_marked(g, a, b, marks_of(f, a, b), tolerance);
    a = b;
  }
  return total;
}

double abs_quadrature(const ApFunction& f, double lo, double hi, double tolerance) {
  auto g = [&f](double x) { return cplx(std::abs(evaluate(f, x))); };
  cplx total = 0.0;
  constexpr int kCells = 16;
  for (int i = 0; i < kCells; ++i) {
    const double a = lo + (hi - lo) * i / kCells;
    const double b = i + 1 == kCells ? hi : lo + (hi - lo) * (i + 1) / kCells;
    total += quad::integrate_marked(g, a, b, marks_of(f, a, b), tolerance);
  }
  return total.real();
}

// Windowed averages (1/2T) int_{-T}^{T} g at T, T/2, T/4 plus a Richardson
// extrapolation R(T) = 2 A(T) - A(T/2).
MeanEstimate windowed(const std::function<cplx(double, double)>& integral, double t_max, double tolerance) {
  const double t = std::floor(t_max);
  if (t < 8.0) throw InvalidArgument("T_max must be at least 8");
  const double t2 = std::floor(t / 2);
  const double t4 = std::floor(t / 4);
  const cplx i4 = integral(-t4, t4);
  const cplx i2 = i4 + integral(-t2, -t4) + integral(t4, t2);
  const cplx i1 = i2 + integral(-t, -t2) + integral(t2, t);
  const cplx a1 = i1 / (2 * t);
  const cplx a2 = i2 / (2 * t2);
  const cplx a4 = i4 / (2 * t4);
  const cplx r1 = 2.0 * a1 - a2;
  const cplx r2 = 2.0 * a2 - a4;
  MeanEstimate out;
  const double plain = std::abs(a1 - a2);
  const double richardson = std::abs(r1 - r2);
  if (richardson < plain) {
    out.value = r1;
    out.error = richardson;
  } else {
    out.value = a1;
    out.error = plain;
  }
  out.converged = out.error <= tolerance;
  return out;
}

cplx step_fourier(const PeriodicFunction& p, double k) {
  // (1/L) int_0^L exp(-2 pi i k x) f(x) dx for a step function on [0, 1).
  cplx s = 0.0;
  double prev = 0.0;
  const auto& b = p.breakpoints();
  for (std::size_t i = 0; i <= b.size(); ++i) {
    const double end = i < b.size() ? b[i] : 1.0;
    s += p.step_values()[i] * (character_at(-k * end) - character_at(-k * prev)) / cplx(0.0, -kTwoPi * k);
    prev = end;
  }
  return s;
}

}  // namespace

cplx integrate(const ApFunction& f, double lo, double hi, double tolerance) {
  if (hi < lo) return -integrate(f, hi, lo, tolerance);
  return std::visit(
      [&](const auto& g) -> cplx {
        using T = std::decay_t<decltype(g)>;
        if constexpr (std::is_same_v<T, ContinuousFunction>)
          return quadrature(f, [&g](double x) { return g(x); }, lo, hi, tolerance);
        else
          return g.integral(lo, hi);
      },
      f);
}

MeanEstimate mean(const ApFunction& f, double t_max, double tolerance) {
  if (!(tolerance > 0.0)) throw InvalidArgument("tolerance must be positive");
  if (const auto* t = std::get_if<TrigPolynomial>(&f)) return {t->a0(), 0.0, true};
  if (const auto* b = std::get_if<BohrSeries>(&f)) return {b->a0(), 0.0, true};
  if (const auto* p = std::get_if<PeriodicFunction>(&f)) return {p->integral(0.0, p->period()) / p->period(), tolerance, true};
  if (const auto* s = std::get_if<SingularPeriodic>(&f)) return {s->mean(), 0.0, true};
  return windowed([&](double lo, double hi) { return integrate(f, lo, hi, tolerance); }, t_max, tolerance);
}

MeanEstimate fourier_bohr(const ApFunction& f, const RealConstant& k, double t_max, double tolerance) {
  if (!(tolerance > 0.0)) throw InvalidArgument("tolerance must be positive");
  const RealConstant zero(0L);
  if (k == zero) return mean(f, t_max, tolerance);
  const double kd = k.to_double();
  if (const auto* t = std::get_if<TrigPolynomial>(&f)) {
    for (const TrigTerm& term : t->terms())
      if (term.k == k) return {term.a, 0.0, true};
    return {0.0, 0.0, true};
  }
  if (const auto* b = std::get_if<BohrSeries>(&f)) {
    for (const TrigTerm& term : b->terms())
      if (term.k == k) return {term.a, b->extra_tail(), true};
    return {0.0, b->extra_tail(), true};
  }
  auto periodic_coefficient = [&](double period, const std::function<cplx()>& closed) -> MeanEstimate {
    const double kl = kd * period;
    if (std::fabs(kl - std::round(kl)) > 1e-9) return {0.0, 0.0, true};
    return {closed(), tolerance, true};
  };
  auto modulated = [&](double x) { return character_at(-kd * x) * evaluate(f, x); };
  if (const auto* p = std::get_if<PeriodicFunction>(&f)) {
    return periodic_coefficient(p->period(), [&]() {
      if (p->is_step()) return step_fourier(*p, kd);
      return quadrature(f, modulated, 0.0, p->period(), tolerance) / p->period();
    });
  }
  if (std::holds_alternative<SingularPeriodic>(f))
    return periodic_coefficient(1.0, [&]() { return quadrature(f, modulated, 0.0, 1.0, tolerance); });
  return windowed([&](double lo, double hi) { return quadrature(f, modulated, lo, hi, tolerance); }, t_max, tolerance);
}

StepanovNorm stepanov_norm(const ApFunction& f, double grid_step, double span) {
  if (!(grid_step > 0.0 && grid_step <= 1.0)) throw InvalidArgument("grid step must lie in (0, 1]");
  if (!(span > 0.0)) throw InvalidArgument("span must be positive");
  auto window = [&](double x) {
    const double v = abs_quadrature(f, x, x + 1.0, 1e-12);
    if (!std::isfinite(v))
      throw InvalidArgument("divergent window integral on [" + json_number(x) + ", " + json_number(x + 1.0) + "]");
    return v;
  };
  if (const auto period = period_of(f)) {
    const double m = 1.0 / *period;
    if (std::fabs(m - std::round(m)) < 1e-12 && std::round(m) >= 1.0) {
      const double v = window(0.0);
      return {v, v, true};
    }
  }
  StepanovNorm out{0.0, 0.0, false};
  const auto steps = static_cast<long>(std::ceil(span / grid_step));
  for (long j = 0; j < steps; ++j) {
    const double x = j * grid_step;
    const double v = window(x);
    out.lower_bound = std::max(out.lower_bound, v);
    out.refined = std::max({out.refined, v, window(x + 0.5 * grid_step)});
  }
  return out;
}

ApFunction mollify(const ApFunction& f, double delta) {
  if (!(delta > 0.0)) throw InvalidArgument("mollifier half-width must be positive");
  auto damp = [delta](const std::vector<TrigTerm>& terms) {
    std::vector<TrigTerm> out = terms;
    for (TrigTerm& t : out) {
      const double w = kTwoPi * t.k.to_double() * delta;
      t.a *= std::sin(w) / w;
    }
    return out;
  };
  if (const auto* t = std::get_if<TrigPolynomial>(&f)) return TrigPolynomial(t->a0(), damp(t->terms()));
  if (const auto* b = std::get_if<BohrSeries>(&f)) return BohrSeries(b->a0(), damp(b->terms()), b->extra_tail());

  auto shared = std::make_shared<const ApFunction>(f);
  auto avg = [shared, delta](double x) { return integrate(*shared, x - delta, x + delta) / (2.0 * delta); };
  const std::string text = "{\"type\":\"mollified\",\"delta\":" + json_number(delta) + ",\"f\":" + describe(f) + "}";
  if (const auto period = period_of(f)) {
    PeriodicFunction out(*period, avg, text);
    out.with_derivative([shared, delta](double x) {
      return (evaluate(*shared, x + delta) - evaluate(*shared, x - delta)) / (2.0 * delta);
    });
    out.with_antiderivative([shared, delta](double y) {
      // int_0^y f_delta = (1/2delta) int_{-delta}^{delta} int_0^y f(x + u) dx du, evaluated by quadrature in u.
      auto inner = [&](double u) { return integrate(*shared, u, y + u); };
      return quad::integrate_marked(inner, -delta, delta, {}, 1e-12) / (2.0 * delta);
    });
    return out;
  }
  return ContinuousFunction(avg, text);
}

double variation_V_N(const ApFunction& f, double z, double s, double n) {
  if (!(s > 0.0)) throw InvalidArgument("s must be positive");
  if (!(n >= 2.0)) throw InvalidArgument("N must be at least 2");
  const double h = std::pow(n, -s);
  if (const auto* sp = std::get_if<SingularPeriodic>(&f)) {
    const double zr = frac(z);
    for (const Singularity& sg : sp->singularities()) {
      const double d = std::fabs(sg.z - zr);
      if (std::min(d, 1.0 - d) > 1e-12) continue;
      if (h >= sg.delta) throw InvalidArgument("window degenerate: N^-s >= delta");
      double v = 0.0;
      for (double c : {sg.c_left, sg.c_right})
        if (c != 0.0) v += std::fabs(c) * (std::pow(h, -sg.a) - std::pow(sg.delta, -sg.a));
      if (const auto& r = sp->remainder()) {
        if (!r->has_derivative()) throw InvalidArgument("remainder has no derivative");
        auto g = [&r](double x) { return std::abs(r->derivative(x)); };
        std::vector<quad::Mark> marks;
        for (double b : r->breakpoints())
          for (double k = -1.0; k <= 1.0; k += 1.0) marks.push_back({b + k, 0.0});
        v += quad::integrate_marked_real(g, z - sg.delta, z - h, marks, 1e-12);
        v += quad::integrate_marked_real(g, z + h, z + sg.delta, marks, 1e-12);
      }
      return v;
    }
    throw InvalidArgument("z is not a declared singularity");
  }
  if (const auto* st = std::get_if<StepanovFunction>(&f)) {
    if (st->set().dist(z) > 1e-12) throw InvalidArgument("z is not a point of the singular set");
    const double r = st->radius();
    if (h >= r) throw InvalidArgument("window degenerate: N^-s >= radius");
    double v = 2.0 * std::fabs(st->coefficient()) * (std::pow(h, -st->exponent()) - std::pow(r, -st->exponent()));
    auto g = [st](double x) { return std::abs(st->smooth().derivative(x)); };
    v += quad::integrate(g, z - r, z - h, 1e-12) + quad::integrate(g, z + h, z + r, 1e-12);
    return v;
  }
  throw InvalidArgument("variation needs a singular periodic or Stepanov function");
}

TruncatedBohr truncate_bohr(const BohrSeries& series, std::size_t m) { return series.truncate(m); }

ApFunction subtract(const ApFunction& f, const ApFunction& g) {
  auto pf = std::make_shared<const ApFunction>(f);
  auto pg = std::make_shared<const ApFunction>(g);
  auto diff = [pf, pg](double x) { return evaluate(*pf, x) - evaluate(*pg, x); };
  const std::string text = "{\"type\":\"difference\",\"f\":" + describe(f) + ",\"g\":" + describe(g) + "}";
  const auto lf = period_of(f);
  const auto lg = period_of(g);
  if (lf && lg && *lf == *lg) {
    std::vector<double> points;
    for (const quad::Mark& m : marks_of(f, 0.0, *lf)) points.push_back(m.at);
    for (const quad::Mark& m : marks_of(g, 0.0, *lf)) points.push_back(m.at);
    std::sort(points.begin(), points.end());
    points.erase(std::unique(points.begin(), points.end()), points.end());
    points.erase(std::remove_if(points.begin(), points.end(), [&](double p) { return p <= 0.0 || p >= *lf; }),
                 points.end());
    PeriodicFunction out(*lf, diff, text);
    out.with_breakpoints(points);
    return out;
  }
  return ContinuousFunction(diff, text);
}

}  // namespace avglab
