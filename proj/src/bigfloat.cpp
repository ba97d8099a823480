#include "avglab/bigfloat.hpp"

#include <algorithm>
#include <memory>

namespace avglab {

BigFloat::BigFloat(mpfr_bits precision) {
  mpfr_init2(value_, std::max<mpfr_bits>(precision, MPFR_PREC_MIN));
  mpfr_set_zero(value_, 1);
}

BigFloat::BigFloat(const BigFloat& other) {
  mpfr_init2(value_, other.precision());
  mpfr_set(value_, other.value_, MPFR_RNDN);
}

BigFloat::BigFloat(BigFloat&& other) noexcept {
  mpfr_init2(value_, MPFR_PREC_MIN);
  mpfr_swap(value_, other.value_);
}

BigFloat& BigFloat::operator=(const BigFloat& other) {
  if (this != &other) {
    mpfr_set_prec(value_, other.precision());
    mpfr_set(value_, other.value_, MPFR_RNDN);
  }
  return *this;
}

BigFloat& BigFloat::operator=(BigFloat&& other) noexcept {
  if (this != &other) mpfr_swap(value_, other.value_);
  return *this;
}

BigFloat::~BigFloat() { mpfr_clear(value_); }

BigFloat BigFloat::from_double(double v, mpfr_bits precision) {
  BigFloat r(precision);
  mpfr_set_d(r.value_, v, MPFR_RNDN);
  return r;
}

BigFloat BigFloat::from_mpz(const mpz_class& v, mpfr_bits precision) {
  BigFloat r(precision);
  mpfr_set_z(r.value_, v.get_mpz_t(), MPFR_RNDN);
  return r;
}

BigFloat BigFloat::from_mpz_exact(const mpz_class& v) {
  const auto bits = static_cast<mpfr_bits>(mpz_sizeinbase(v.get_mpz_t(), 2));
  return from_mpz(v, std::max<mpfr_bits>(bits, 2));
}

BigFloat BigFloat::from_mpq(const mpq_class& v, mpfr_bits precision) {
  BigFloat r(precision);
  mpfr_set_q(r.value_, v.get_mpq_t(), MPFR_RNDN);
  return r;
}

BigFloat BigFloat::from_string(const std::string& decimal, mpfr_bits precision) {
  BigFloat r(precision);
  mpfr_set_str(r.value_, decimal.c_str(), 10, MPFR_RNDN);
  return r;
}

BigFloat BigFloat::pi(mpfr_bits precision) {
  BigFloat r(precision);
  mpfr_const_pi(r.value_, MPFR_RNDN);
  return r;
}

BigFloat BigFloat::euler_e(mpfr_bits precision) {
  BigFloat r(precision);
  mpfr_set_ui(r.value_, 1, MPFR_RNDN);
  mpfr_exp(r.value_, r.value_, MPFR_RNDN);
  return r;
}

void BigFloat::round_to(mpfr_bits precision) { mpfr_prec_round(value_, precision, MPFR_RNDN); }

mpq_class BigFloat::to_mpq() const {
  mpz_class mant;
  const mpfr_exp_t e = mpfr_get_z_2exp(mant.get_mpz_t(), value_);
  mpq_class q(mant);
  if (e >= 0) {
    mpq_mul_2exp(q.get_mpq_t(), q.get_mpq_t(), static_cast<mp_bitcnt_t>(e));
  } else {
    mpq_div_2exp(q.get_mpq_t(), q.get_mpq_t(), static_cast<mp_bitcnt_t>(-e));
  }
  return q;
}

std::string BigFloat::to_string(int digits) const {
  const int n = mpfr_snprintf(nullptr, 0, "%.*Rg", digits, value_);
  std::string out(static_cast<std::size_t>(n) + 1, '\0');
  mpfr_snprintf(out.data(), out.size(), "%.*Rg", digits, value_);
  out.resize(static_cast<std::size_t>(n));
  return out;
}

BigFloat BigFloat::floor() const {
  BigFloat r(precision());
  mpfr_floor(r.value_, value_);
  return r;
}

BigFloat BigFloat::frac() const {
  // mpfr_frac truncates toward zero; shift negatives into [0, 1).
  BigFloat r(precision());
  mpfr_frac(r.value_, value_, MPFR_RNDN);
  if (mpfr_sgn(r.value_) < 0) mpfr_add_ui(r.value_, r.value_, 1, MPFR_RNDN);
  // Rounding of 1 - tiny can land on 1 exactly.
  if (mpfr_cmp_ui(r.value_, 1) >= 0) mpfr_set_zero(r.value_, 1);
  return r;
}

BigFloat BigFloat::abs() const {
  BigFloat r(precision());
  mpfr_abs(r.value_, value_, MPFR_RNDN);
  return r;
}

BigFloat BigFloat::sqrt() const {
  BigFloat r(precision());
  mpfr_sqrt(r.value_, value_, MPFR_RNDN);
  return r;
}

BigFloat operator+(const BigFloat& a, const BigFloat& b) {
  BigFloat r(a.precision());
  mpfr_add(r.value_, a.value_, b.value_, MPFR_RNDN);
  return r;
}

BigFloat operator-(const BigFloat& a, const BigFloat& b) {
  BigFloat r(a.precision());
  mpfr_sub(r.value_, a.value_, b.value_, MPFR_RNDN);
  return r;
}

BigFloat operator*(const BigFloat& a, const BigFloat& b) {
  BigFloat r(a.precision());
  mpfr_mul(r.value_, a.value_, b.value_, MPFR_RNDN);
  return r;
}

BigFloat operator/(const BigFloat& a, const BigFloat& b) {
  BigFloat r(a.precision());
  mpfr_div(r.value_, a.value_, b.value_, MPFR_RNDN);
  return r;
}

BigFloat operator*(const BigFloat& a, long b) {
  BigFloat r(a.precision());
  mpfr_mul_si(r.value_, a.value_, b, MPFR_RNDN);
  return r;
}

BigFloat operator/(const BigFloat& a, long b) {
  BigFloat r(a.precision());
  mpfr_div_si(r.value_, a.value_, b, MPFR_RNDN);
  return r;
}

BigFloat operator-(const BigFloat& a) {
  BigFloat r(a.precision());
  mpfr_neg(r.value_, a.value_, MPFR_RNDN);
  return r;
}

}  // namespace avglab
