#pragma once

#include <gmpxx.h>
#include <mpfr.h>

#include <string>
#include <utility>

namespace avglab {

using mpfr_bits = mpfr_prec_t;

// Owning wrapper around an MPFR value. Every arithmetic result takes the
// precision of the left operand unless a precision is given explicitly.
// All operations round to nearest.
class BigFloat {
 public:
  explicit BigFloat(mpfr_bits precision = 128);
  BigFloat(const BigFloat& other);
  BigFloat(BigFloat&& other) noexcept;
  BigFloat& operator=(const BigFloat& other);
  BigFloat& operator=(BigFloat&& other) noexcept;
  ~BigFloat();

  static BigFloat from_double(double v, mpfr_bits precision);
  static BigFloat from_mpz(const mpz_class& v, mpfr_bits precision);
  // Exact when `precision` is at least the bit length of `v`.
  static BigFloat from_mpz_exact(const mpz_class& v);
  static BigFloat from_mpq(const mpq_class& v, mpfr_bits precision);
  static BigFloat from_string(const std::string& decimal, mpfr_bits precision);
  static BigFloat pi(mpfr_bits precision);
  static BigFloat euler_e(mpfr_bits precision);

  mpfr_bits precision() const { return mpfr_get_prec(value_); }
  // Changes precision, rounding the current value.
  void round_to(mpfr_bits precision);

  double to_double() const { return mpfr_get_d(value_, MPFR_RNDN); }
  long double to_long_double() const { return mpfr_get_ld(value_, MPFR_RNDN); }
  // Exact conversion; the value must be finite.
  mpq_class to_mpq() const;
  std::string to_string(int digits) const;

  bool is_zero() const { return mpfr_zero_p(value_) != 0; }
  bool is_integer() const { return mpfr_integer_p(value_) != 0; }
  int sign() const { return mpfr_sgn(value_); }
  // floor(log2 |x|) + 1 for non-zero x, i.e. the binary exponent.
  long exponent() const { return mpfr_get_exp(value_); }

  BigFloat floor() const;
  // x - floor(x), always in [0, 1).
  BigFloat frac() const;
  BigFloat abs() const;
  BigFloat sqrt() const;

  friend BigFloat operator+(const BigFloat& a, const BigFloat& b);
  friend BigFloat operator-(const BigFloat& a, const BigFloat& b);
  friend BigFloat operator*(const BigFloat& a, const BigFloat& b);
  friend BigFloat operator/(const BigFloat& a, const BigFloat& b);
  friend BigFloat operator*(const BigFloat& a, long b);
  friend BigFloat operator/(const BigFloat& a, long b);
  friend BigFloat operator-(const BigFloat& a);

  friend bool operator<(const BigFloat& a, const BigFloat& b) { return mpfr_less_p(a.value_, b.value_) != 0; }
  friend bool operator<=(const BigFloat& a, const BigFloat& b) { return mpfr_lessequal_p(a.value_, b.value_) != 0; }
  friend bool operator==(const BigFloat& a, const BigFloat& b) { return mpfr_equal_p(a.value_, b.value_) != 0; }

  mpfr_ptr raw() { return value_; }
  mpfr_srcptr raw() const { return value_; }

 private:
  mpfr_t value_;
};

}  // namespace avglab
