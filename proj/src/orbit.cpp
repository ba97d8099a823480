#include "avglab/orbit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <ostream>

#include "avglab/error.hpp"

namespace avglab {
namespace {

constexpr double kDoubleRounding = 0x1.0p-53;

// frac(y / 2^w) as a double in [0,1), correctly rounded up to 2^-64.
double fixed_point_frac(const mpz_class& y, unsigned long w) {
  mpz_class low;
  mpz_fdiv_r_2exp(low.get_mpz_t(), y.get_mpz_t(), w);
  double v = 0.0;
  if (w <= 64) {
    // low < 2^w <= 2^64 fits in 64 bits.
    const auto hi = static_cast<std::uint64_t>(mpz_class(low >> 32).get_ui());
    const auto lo = static_cast<std::uint64_t>(mpz_class(low & 0xffffffffUL).get_ui());
    v = std::ldexp(static_cast<double>((hi << 32) | lo), -static_cast<int>(w));
  } else {
    mpz_class top = low >> static_cast<mp_bitcnt_t>(w - 64);
    const auto hi = static_cast<std::uint64_t>(mpz_class(top >> 32).get_ui());
    const auto lo = static_cast<std::uint64_t>(mpz_class(top & 0xffffffffUL).get_ui());
    v = std::ldexp(static_cast<double>((hi << 32) | lo), -64);
  }
  if (v >= 1.0) v = std::nextafter(1.0, 0.0);
  return v;
}

// num / den for 0 <= num < den, as a double in [0,1).
double unit_ratio(const mpz_class& num, const mpz_class& den) {
  mpz_class scaled = num << 64;
  mpz_class q;
  mpz_fdiv_q(q.get_mpz_t(), scaled.get_mpz_t(), den.get_mpz_t());
  return fixed_point_frac(q, 64);
}

double clamp_unit(double v) {
  if (v >= 1.0) return std::nextafter(1.0, 0.0);
  if (v < 0.0) return 0.0;
  return v;
}

BigFloat fixed_point_value(const mpz_class& y, unsigned long w) {
  BigFloat v = BigFloat::from_mpz_exact(y);
  mpfr_div_2ui(v.raw(), v.raw(), w, MPFR_RNDN);
  return v;
}

// Tracks a sequence of positive bounds that may overflow double range.
struct Log2Tracker {
  double value = -std::numeric_limits<double>::infinity();
  void observe(double log2_bound) { value = std::max(value, log2_bound); }
};

void check_target(double target_error) {
  if (!(target_error >= 0x1.0p-52 && target_error <= 0x1.0p-20)) {
    throw InvalidArgument("target_error must lie in [2^-52, 2^-20], got " + std::to_string(target_error));
  }
}

void check_budget(long long precision_bits, std::size_t n, const OrbitOptions& options) {
  const std::size_t budget = options.budget_bytes.value_or(default_precision_budget_bytes());
  const long double bytes_per_value = static_cast<long double>(precision_bits) / 8.0L;
  const long double values = options.retain_unreduced ? static_cast<long double>(n) + 4.0L : 6.0L;
  const long double need = bytes_per_value * values;
  if (need > static_cast<long double>(budget)) {
    throw PrecisionBudgetExceeded("orbit needs " + std::to_string(precision_bits) +
                                      " bits of working precision (" +
                                      std::to_string(static_cast<long long>(need / (1024.0L * 1024.0L))) +
                                      " MiB), exceeding the budget of " +
                                      std::to_string(budget / (1024 * 1024)) + " MiB",
                                  precision_bits);
  }
}

}  // namespace

class OrbitBuilder {
 public:
  OrbitBuilder(std::size_t n, bool retain) : retain_(retain) {
    orbit_.entries_.reserve(n);
    if (retain) {
      orbit_.unreduced_.reserve(n);
      orbit_.unreduced_errors_.reserve(n);
    }
  }

  bool retain() const { return retain_; }
  void push(double entry) { orbit_.entries_.push_back(entry); }
  void push_unreduced(BigFloat value, double error) {
    orbit_.unreduced_.push_back(std::move(value));
    orbit_.unreduced_errors_.push_back(error);
  }

  FractionalOrbit finish(OrbitMode mode, OrbitPath path, std::string description, double error, double scale,
                         long long precision) {
    orbit_.mode_ = mode;
    orbit_.path_ = path;
    orbit_.description_ = std::move(description);
    orbit_.guaranteed_abs_error_ = error;
    orbit_.scale_ = scale;
    orbit_.working_precision_ = precision;
    return std::move(orbit_);
  }

  // Copies the selected entries of `src` (used by subsample).
  static FractionalOrbit select(const FractionalOrbit& src, const std::vector<std::size_t>& idx) {
    FractionalOrbit out;
    out.entries_.reserve(idx.size());
    for (std::size_t i : idx) {
      out.entries_.push_back(src.entries_[i]);
      if (src.has_unreduced()) {
        out.unreduced_.push_back(src.unreduced_[i]);
        out.unreduced_errors_.push_back(src.unreduced_errors_[i]);
      }
    }
    out.mode_ = src.mode_;
    out.path_ = src.path_;
    out.description_ = src.description_;
    out.guaranteed_abs_error_ = src.guaranteed_abs_error_;
    out.scale_ = src.scale_;
    out.working_precision_ = src.working_precision_;
    return out;
  }

  static FractionalOrbit rescaled(const FractionalOrbit& src, const std::vector<std::size_t>& idx, double modulus) {
    FractionalOrbit out = select(src, idx);
    const BigFloat l = BigFloat::from_double(modulus, 64);
    double max_err = 0.0;
    for (std::size_t j = 0; j < idx.size(); ++j) {
      const BigFloat& u = out.unreduced_[j];
      BigFloat q(u.precision() + 64);
      mpfr_div(q.raw(), u.raw(), l.raw(), MPFR_RNDN);
      out.entries_[j] = clamp_unit(q.frac().to_double());
      max_err = std::max(max_err, out.unreduced_errors_[j] / modulus);
    }
    out.scale_ = modulus;
    out.guaranteed_abs_error_ = max_err + kDoubleRounding + 0x1.0p-60;
    return out;
  }

  static void relabel(FractionalOrbit& orbit, OrbitMode mode, std::string description) {
    orbit.mode_ = mode;
    orbit.description_ = std::move(description);
  }

 private:
  FractionalOrbit orbit_;
  bool retain_;
};

const char* to_string(OrbitMode mode) {
  switch (mode) {
    case OrbitMode::exponential: return "exponential";
    case OrbitMode::beta_transform: return "beta_transform";
    case OrbitMode::general: return "general";
  }
  return "?";
}

const char* to_string(OrbitPath path) {
  switch (path) {
    case OrbitPath::exact_rational: return "exact_rational";
    case OrbitPath::quadratic_recurrence: return "quadratic_recurrence";
    case OrbitPath::quadratic_coefficients: return "quadratic_coefficients";
    case OrbitPath::bigfloat: return "bigfloat";
    case OrbitPath::exact_field: return "exact_field";
    case OrbitPath::fast_double: return "fast_double";
    case OrbitPath::external: return "external";
  }
  return "?";
}

std::size_t default_precision_budget_bytes() {
  std::size_t mib = 256;
  if (const char* env = std::getenv("AVGLAB_PRECISION_BUDGET_MB")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) mib = static_cast<std::size_t>(v);
  }
  return mib * 1024 * 1024;
}

long long orbit_working_precision(double abs_alpha_log2, double abs_x, std::size_t n, double target_error) {
  const auto nn = static_cast<double>(n);
  return static_cast<long long>(std::ceil(nn * abs_alpha_log2)) +
         static_cast<long long>(std::ceil(std::log2(abs_x + 2.0))) +
         static_cast<long long>(std::ceil(std::log2(std::max(nn, 1.0)))) +
         static_cast<long long>(std::ceil(-std::log2(target_error))) + 32;
}

FractionalOrbit FractionalOrbit::from_entries(std::vector<double> entries, std::string description,
                                              double guaranteed_abs_error) {
  for (double e : entries) {
    if (!(e >= 0.0 && e < 1.0)) throw InvalidArgument("orbit entries must lie in [0,1)");
  }
  FractionalOrbit o;
  o.entries_ = std::move(entries);
  o.description_ = std::move(description);
  o.guaranteed_abs_error_ = guaranteed_abs_error;
  return o;
}

std::span<const double> FractionalOrbit::prefix(std::size_t n) const {
  if (n > entries_.size()) throw InvalidArgument("prefix longer than orbit");
  return std::span<const double>(entries_).first(n);
}

const BigFloat& FractionalOrbit::unreduced(std::size_t i) const {
  if (unreduced_.empty()) throw InvalidArgument("orbit was generated without unreduced values");
  return unreduced_.at(i);
}

double FractionalOrbit::unreduced_error(std::size_t i) const {
  if (unreduced_.empty()) throw InvalidArgument("orbit was generated without unreduced values");
  return unreduced_errors_.at(i);
}

namespace {

// alpha = p/q, x = X/D. Keeps Q_n = floor(alpha^n x 2^w) and the exact
// remainder R_n of alpha^n x 2^w = Q_n + R_n / V_n with V_n = q^n D; every
// step is a multiplication by a small factor plus a division with a small
// quotient.
FractionalOrbit exact_rational_orbit(const mpq_class& alpha, const mpq_class& x, std::size_t n, double target,
                                     long long precision, long long extra_bits, OrbitBuilder& b,
                                     const std::string& desc) {
  const auto w = static_cast<unsigned long>(std::max(64.0, std::ceil(-std::log2(target)) + 12.0) +
                                            static_cast<double>(extra_bits));
  const mpz_class p = alpha.get_num();
  const mpz_class q = alpha.get_den();
  mpz_class v = x.get_den();
  mpz_class u0 = mpz_class(x.get_num()) << w;
  mpz_class quot;
  mpz_class rem;
  mpz_fdiv_qr(quot.get_mpz_t(), rem.get_mpz_t(), u0.get_mpz_t(), v.get_mpz_t());
  const double fixed_err = std::ldexp(1.0, -static_cast<int>(w));
  mpz_class a;
  mpz_class bq;
  mpz_class t;
  mpz_class c;
  for (std::size_t i = 0; i < n; ++i) {
    b.push(fixed_point_frac(quot, w));
    if (b.retain()) b.push_unreduced(fixed_point_value(quot, w), rem == 0 ? 0.0 : fixed_err);
    if (i + 1 == n) break;
    mpz_class pq = p * quot;
    mpz_fdiv_qr(a.get_mpz_t(), bq.get_mpz_t(), pq.get_mpz_t(), q.get_mpz_t());
    mpz_class v_next = v * q;
    t = bq * v + p * rem;
    mpz_fdiv_qr(c.get_mpz_t(), rem.get_mpz_t(), t.get_mpz_t(), v_next.get_mpz_t());
    quot = a + c;
    v = std::move(v_next);
  }
  return b.finish(OrbitMode::exponential, OrbitPath::exact_rational, desc, fixed_err + kDoubleRounding + 0x1.0p-64,
                  1.0, precision);
}

// alpha^2 = t alpha - s with integers t, s: y_n = alpha^n x 2^w obeys the same
// integer recurrence, so only the two starting values carry rounding error.
FractionalOrbit quadratic_recurrence_orbit(const QuadraticNumber& alpha, const mpq_class& x, std::size_t n,
                                           double target, long long precision, OrbitBuilder& b,
                                           const std::string& desc) {
  const mpz_class t = mpq_class(alpha.trace()).get_num();
  const mpz_class s = mpq_class(alpha.norm()).get_num();
  const double abs_t = std::fabs(t.get_d());
  const double abs_s = std::fabs(s.get_d());

  // Error growth E_{k+2} = |t| E_{k+1} + |s| E_k, E_0 = E_1 = 1 (units of 2^-w).
  double log2_growth_end = 0.0;
  {
    double e0 = 1.0;
    double e1 = 1.0;
    double shift = 0.0;
    for (std::size_t k = 2; k < n; ++k) {
      const double e2 = abs_t * e1 + abs_s * e0;
      e0 = e1;
      e1 = e2;
      if (e1 > 0x1.0p500) {
        e0 *= 0x1.0p-500;
        e1 *= 0x1.0p-500;
        shift += 500.0;
      }
    }
    log2_growth_end = std::log2(std::max(e1, 1.0)) + shift;
  }
  const long long w_needed = static_cast<long long>(std::ceil(log2_growth_end)) +
                             static_cast<long long>(std::ceil(-std::log2(target))) + 16;
  const auto w = static_cast<unsigned long>(std::max<long long>(precision, w_needed));

  const mpz_class xnum_scaled = mpz_class(x.get_num()) << w;
  const mpq_class x_scaled(xnum_scaled, x.get_den());
  mpz_class y0;
  mpz_fdiv_q(y0.get_mpz_t(), xnum_scaled.get_mpz_t(), x.get_den_mpz_t());
  const bool x0_exact = mpz_divisible_p(xnum_scaled.get_mpz_t(), x.get_den_mpz_t()) != 0;
  mpz_class y1 = (alpha * x_scaled).floor();

  Log2Tracker worst;
  double e0 = 1.0;
  double e1 = 1.0;
  double shift = 0.0;
  mpz_class y2;
  for (std::size_t i = 0; i < n; ++i) {
    const mpz_class& y = (i == 0) ? y0 : y1;
    const double log2_err = (i == 0 ? 0.0 : std::log2(e1) + shift) - static_cast<double>(w);
    worst.observe(log2_err);
    b.push(fixed_point_frac(y, w));
    if (b.retain()) b.push_unreduced(fixed_point_value(y, w), i == 0 && x0_exact ? 0.0 : std::exp2(log2_err));
    if (i == 0) continue;
    if (i + 1 == n) break;
    y2 = t * y1 - s * y0;
    y0 = std::move(y1);
    y1 = std::move(y2);
    const double e2 = abs_t * e1 + abs_s * e0;
    e0 = e1;
    e1 = e2;
    if (e1 > 0x1.0p500) {
      e0 *= 0x1.0p-500;
      e1 *= 0x1.0p-500;
      shift += 500.0;
    }
  }
  return b.finish(OrbitMode::exponential, OrbitPath::quadratic_recurrence, desc,
                  std::exp2(worst.value) + kDoubleRounding + 0x1.0p-64, 1.0, static_cast<long long>(w));
}

// General quadratic alpha: alpha^n = c_n alpha + d_n with exact rationals,
// and sqrt(d)|X| 2^w by an exact integer square root.
FractionalOrbit quadratic_coefficient_orbit(const QuadraticNumber& alpha, const mpq_class& x, std::size_t n,
                                            double /*target*/, long long precision, OrbitBuilder& b,
                                            const std::string& desc) {
  const double log2_b = std::log2(std::fabs(alpha.b().get_d()) + 1.0);
  const auto w = static_cast<unsigned long>(precision + 16 + static_cast<long long>(std::ceil(log2_b)));
  const mpq_class t = alpha.trace();
  const mpq_class s = alpha.norm();
  const mpz_class xnum = x.get_num();
  const mpz_class xden = x.get_den();
  const int xsign = sgn(xnum);
  mpz_class radicand = mpz_class(static_cast<unsigned long>(alpha.d())) * xnum * xnum;
  radicand <<= 2 * w;
  mpz_class root;
  mpz_sqrt(root.get_mpz_t(), radicand.get_mpz_t());  // floor(sqrt(d) |X| 2^w)
  const mpq_class x_scaled(mpz_class(xnum << w), xden);
  const mpq_class root_term = mpq_class(root * xsign, xden);

  mpq_class c = 0;
  mpq_class d = 1;
  Log2Tracker worst;
  for (std::size_t i = 0; i < n; ++i) {
    const mpq_class value = (c * alpha.a() + d) * x_scaled + c * alpha.b() * root_term;
    mpz_class y;
    mpz_fdiv_q(y.get_mpz_t(), value.get_num_mpz_t(), value.get_den_mpz_t());
    const mpq_class cb = abs(c * alpha.b());
    const bool exact = c == 0 && mpz_divisible_p(value.get_num_mpz_t(), value.get_den_mpz_t()) != 0;
    const double err_units = exact ? 0.0 : cb.get_d() / xden.get_d() + 1.0;
    const double log2_err = std::log2(err_units) - static_cast<double>(w);
    worst.observe(log2_err);
    b.push(fixed_point_frac(y, w));
    if (b.retain()) b.push_unreduced(fixed_point_value(y, w), exact ? 0.0 : std::exp2(log2_err));
    const mpq_class c_next = t * c + d;
    d = -s * c;
    c = c_next;
  }
  return b.finish(OrbitMode::exponential, OrbitPath::quadratic_coefficients, desc,
                  std::exp2(worst.value) + kDoubleRounding + 0x1.0p-64, 1.0, static_cast<long long>(w));
}

// Rounded products at precision P + 16; relative error after n products is
// at most (3n + 2) 2^-(P+16).
FractionalOrbit bigfloat_orbit(const RealConstant& alpha, const mpq_class& x, std::size_t n, long long precision,
                               OrbitBuilder& b, const std::string& desc) {
  const mpfr_bits work = precision + 16;
  const BigFloat a = alpha.to_bigfloat(work);
  BigFloat y = BigFloat::from_mpq(x, work);
  const double log2_x = std::log2(std::fabs(x.get_d()) + 0x1.0p-1000);
  const double log2_alpha = alpha.abs_log2();
  Log2Tracker worst;
  for (std::size_t i = 0; i < n; ++i) {
    const double log2_err = static_cast<double>(i) * log2_alpha + log2_x +
                            std::log2(3.0 * static_cast<double>(i) + 3.0) - static_cast<double>(work);
    worst.observe(log2_err);
    b.push(clamp_unit(y.frac().to_double()));
    if (b.retain()) b.push_unreduced(y, std::exp2(log2_err));
    if (i + 1 < n) y = y * a;
  }
  return b.finish(OrbitMode::exponential, OrbitPath::bigfloat, desc,
                  std::exp2(worst.value) + kDoubleRounding + 0x1.0p-64, 1.0, work);
}

}  // namespace

FractionalOrbit generate_orbit(const Multiplier& alpha, const SeedPoint& x, std::size_t n, double target_error,
                               const OrbitOptions& options) {
  if (n == 0) throw InvalidArgument("orbit length N must be >= 1");
  check_target(target_error);
  if (x.value() == 0 && !options.allow_zero_seed) {
    throw InvalidArgument("x = 0 gives the constant zero orbit; set allow_zero_seed to permit it");
  }
  if (options.extra_precision_bits < 0) throw InvalidArgument("extra_precision_bits must be >= 0");
  const long long precision =
      orbit_working_precision(alpha.abs_value_log2(), std::fabs(x.to_double()), n, target_error) +
      options.extra_precision_bits;
  check_budget(precision, n, options);
  const std::string desc = "alpha=" + alpha.to_string() + ";x=" + x.to_string();

  OrbitBuilder b(n, options.retain_unreduced);
  const RealConstant& a = alpha.value();
  if (a.is_rational()) {
    return exact_rational_orbit(a.rational(), x.value(), n, target_error, precision, options.extra_precision_bits, b,
                                desc);
  }
  if (a.is_quadratic()) {
    const QuadraticNumber& qn = a.quadratic();
    if (qn.trace().get_den() == 1 && qn.norm().get_den() == 1) {
      return quadratic_recurrence_orbit(qn, x.value(), n, target_error, precision, b, desc);
    }
    return quadratic_coefficient_orbit(qn, x.value(), n, target_error, precision, b, desc);
  }
  return bigfloat_orbit(a, x.value(), n, precision, b, desc);
}

namespace {

FractionalOrbit beta_rational(const mpq_class& alpha, const mpq_class& x, std::size_t n, OrbitBuilder& b,
                              const std::string& desc) {
  const mpz_class p = alpha.get_num();
  const mpz_class q = alpha.get_den();
  mpz_class num = x.get_num();
  mpz_class den = x.get_den();
  for (std::size_t i = 0; i < n; ++i) {
    b.push(unit_ratio(num, den));
    if (b.retain()) b.push_unreduced(BigFloat::from_mpq(mpq_class(num, den), 128), 0x1.0p-128);
    if (i + 1 == n) break;
    mpz_class scaled = p * num;
    mpz_class next_den = den * q;
    mpz_fdiv_r(num.get_mpz_t(), scaled.get_mpz_t(), next_den.get_mpz_t());
    den = std::move(next_den);
  }
  return b.finish(OrbitMode::beta_transform, OrbitPath::exact_field, desc, kDoubleRounding + 0x1.0p-64, 1.0, 0);
}

// y = (P + Q alpha) / Den exactly; alpha y = (-s Q + (P + t Q) alpha) / Den.
FractionalOrbit beta_quadratic(const QuadraticNumber& alpha, const mpq_class& x, std::size_t n, OrbitBuilder& b,
                               const std::string& desc) {
  const mpq_class t = alpha.trace();
  const mpq_class s = alpha.norm();
  mpz_class scale;
  mpz_lcm(scale.get_mpz_t(), t.get_den_mpz_t(), s.get_den_mpz_t());
  const mpz_class t_scaled = mpq_class(t * scale).get_num();
  const mpz_class s_scaled = mpq_class(s * scale).get_num();
  const bool integral = scale == 1;
  const double alpha_d = alpha.to_double();

  mpz_class pp = x.get_num();
  mpz_class qq = 0;
  mpz_class den = x.get_den();

  auto evaluate = [&](const mpz_class& pv, const mpz_class& qv, const mpz_class& dv, mpfr_bits prec) {
    const BigFloat dn = BigFloat::from_mpz(dv, prec);
    BigFloat r = BigFloat::from_mpz(pv, prec) / dn;
    if (qv != 0) r = r + (BigFloat::from_mpz(qv, prec) / dn) * alpha.to_bigfloat(prec);
    return r;
  };
  auto magnitude_bits = [&](const mpz_class& pv, const mpz_class& qv, const mpz_class& dv) {
    long e = 0;
    double m = 0.0;
    const double pm = std::ldexp(mpz_get_d_2exp(&e, pv.get_mpz_t()), 0);
    const long pe = e;
    const double dm = mpz_get_d_2exp(&e, dv.get_mpz_t());
    const long de = e;
    m = std::fabs(pm) * std::exp2(static_cast<double>(pe - de)) / dm;
    const double qm = mpz_get_d_2exp(&e, qv.get_mpz_t());
    m += std::fabs(qm) * std::exp2(static_cast<double>(e - de)) / dm * std::fabs(alpha_d);
    return static_cast<mpfr_bits>(std::max(0.0, std::ceil(std::log2(m + 1.0))));
  };

  for (std::size_t i = 0; i < n; ++i) {
    const mpfr_bits prec = 96 + magnitude_bits(pp, qq, den);
    const BigFloat y = evaluate(pp, qq, den, prec);
    b.push(clamp_unit(y.to_double()));
    if (b.retain()) b.push_unreduced(y, std::ldexp(1.0, -static_cast<int>(prec) + 8));
    if (i + 1 == n) break;
    mpz_class p_next = -s_scaled * qq;
    mpz_class q_next = integral ? mpz_class(pp + t_scaled * qq) : mpz_class(pp * scale + t_scaled * qq);
    if (!integral) den *= scale;
    // floor(alpha y): a refined approximation, confirmed by exact signs near integers.
    const mpfr_bits zprec = 96 + magnitude_bits(p_next, q_next, den);
    const BigFloat z = evaluate(p_next, q_next, den, zprec);
    mpz_class k;
    mpfr_get_z(k.get_mpz_t(), z.raw(), MPFR_RNDD);
    const double dist_lo = (z - BigFloat::from_mpz(k, zprec)).to_double();
    const double tol = 0x1.0p-80;
    if (dist_lo < tol || 1.0 - dist_lo < tol) {
      auto exact_sign = [&](const mpz_class& kk) {
        const mpz_class shifted = p_next - kk * den;
        return QuadraticNumber(mpq_class(shifted) + mpq_class(q_next) * alpha.a(), mpq_class(q_next) * alpha.b(),
                               alpha.d())
            .sign();
      };
      while (exact_sign(k) < 0) --k;
      while (exact_sign(k + 1) >= 0) ++k;
    }
    pp = p_next - k * den;
    qq = std::move(q_next);
  }
  return b.finish(OrbitMode::beta_transform, OrbitPath::exact_field, desc, kDoubleRounding + 0x1.0p-64, 1.0, 0);
}

FractionalOrbit beta_bigfloat(const RealConstant& alpha, const mpq_class& x, std::size_t n, long long precision,
                              OrbitBuilder& b, const std::string& desc) {
  const mpfr_bits work = precision + 16;
  const BigFloat a = alpha.to_bigfloat(work);
  BigFloat y = BigFloat::from_mpq(x, work);
  const double log2_alpha = alpha.abs_log2();
  Log2Tracker worst;
  for (std::size_t i = 0; i < n; ++i) {
    const double log2_err = static_cast<double>(i) * log2_alpha + std::log2(3.0 * static_cast<double>(i) + 3.0) -
                            static_cast<double>(work);
    worst.observe(log2_err);
    b.push(clamp_unit(y.to_double()));
    if (b.retain()) b.push_unreduced(y, std::exp2(log2_err));
    if (i + 1 < n) y = (y * a).frac();
  }
  return b.finish(OrbitMode::beta_transform, OrbitPath::bigfloat, desc,
                  std::exp2(worst.value) + kDoubleRounding + 0x1.0p-64, 1.0, work);
}

}  // namespace

FractionalOrbit beta_orbit(const Multiplier& alpha, const SeedPoint& x, std::size_t n, BetaMode mode,
                           double target_error, const OrbitOptions& options) {
  if (n == 0) throw InvalidArgument("orbit length N must be >= 1");
  if (!(x.value() >= 0 && x.value() < 1)) throw InvalidArgument("beta orbit needs 0 <= x < 1");
  const std::string desc = "beta;alpha=" + alpha.to_string() + ";x=" + x.to_string();
  OrbitBuilder b(n, options.retain_unreduced);
  if (mode == BetaMode::fast) {
    const double a = alpha.to_double();
    double y = x.to_double();
    for (std::size_t i = 0; i < n; ++i) {
      b.push(clamp_unit(y));
      if (b.retain()) b.push_unreduced(BigFloat::from_double(y, 53), std::numeric_limits<double>::infinity());
      y = a * y;
      y -= std::floor(y);
    }
    return b.finish(OrbitMode::beta_transform, OrbitPath::fast_double, desc,
                    std::numeric_limits<double>::infinity(), 1.0, 53);
  }
  check_target(target_error);
  const long long precision = orbit_working_precision(alpha.abs_value_log2(), x.to_double(), n, target_error);
  check_budget(precision, n, options);
  const RealConstant& a = alpha.value();
  if (a.is_rational()) return beta_rational(a.rational(), x.value(), n, b, desc);
  if (a.is_quadratic()) return beta_quadratic(a.quadratic(), x.value(), n, b, desc);
  return beta_bigfloat(a, x.value(), n, precision, b, desc);
}

GeneralSequence::GeneralSequence(Multiplier base, std::size_t stride, std::size_t offset)
    : base_(std::move(base)), stride_(stride), offset_(offset) {
  if (stride_ == 0) throw InvalidArgument("stride k must be positive");
}

double GeneralSequence::separation_gap() const {
  const double a = std::fabs(base_.to_double());
  const double lead = std::pow(a, static_cast<double>(offset_));
  const double ak = std::pow(a, static_cast<double>(stride_));
  if (base_.to_double() > 0 || stride_ % 2 == 0) return lead * (ak - 1.0);
  // Alternating signs: neighbours are |u| + |u'| apart, same-sign pairs two strides apart.
  return lead * std::min(ak + 1.0, ak * ak - 1.0);
}

double GeneralSequence::term(std::size_t m) const {
  return std::pow(base_.to_double(), static_cast<double>(stride_ * m + offset_));
}

std::string GeneralSequence::describe() const {
  return "powers(" + base_.to_string() + ");k=" + std::to_string(stride_) + ";l=" + std::to_string(offset_);
}

FractionalOrbit generate_general(const GeneralSequence& seq, const SeedPoint& x, std::size_t n, double target_error,
                                 const OrbitOptions& options) {
  if (n == 0) throw InvalidArgument("orbit length N must be >= 1");
  const std::size_t full = seq.stride() * (n - 1) + seq.offset() + 1;
  FractionalOrbit base = generate_orbit(seq.base(), x, full, target_error, options);
  FractionalOrbit out = subsample(base, seq.stride(), seq.offset(), 1.0);
  OrbitBuilder::relabel(out, OrbitMode::general, seq.describe() + ";x=" + x.to_string());
  return out;
}

FractionalOrbit subsample(const FractionalOrbit& orbit, std::size_t stride, std::size_t offset, double modulus) {
  if (stride == 0) throw InvalidArgument("stride k must be positive");
  if (offset >= stride) throw InvalidArgument("offset l must satisfy l < k");
  if (!(modulus > 0.0) || !std::isfinite(modulus)) throw InvalidArgument("modulus L must be positive");
  std::vector<std::size_t> idx;
  for (std::size_t i = offset; i < orbit.size(); i += stride) idx.push_back(i);
  if (modulus == orbit.scale()) return OrbitBuilder::select(orbit, idx);
  if (!orbit.has_unreduced()) {
    throw InvalidArgument("modulus-L subsampling needs an orbit generated with retain_unreduced");
  }
  return OrbitBuilder::rescaled(orbit, idx, modulus);
}

void write_orbit_csv(std::ostream& out, const FractionalOrbit& orbit) {
  out << "n,frac\n";
  char buf[64];
  for (std::size_t i = 0; i < orbit.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%.17e\n", i, orbit[i]);
    out << buf;
  }
}

}  // namespace avglab
