#pragma once

#include <gmpxx.h>

#include <string>

#include "avglab/bigfloat.hpp"

namespace avglab {

bool is_square_free(unsigned long d);

// Exact element a + b*sqrt(d) of the real quadratic field Q(sqrt d), d > 1
// square-free. Rationals are represented with b = 0. Mixed-field arithmetic
// throws InvalidArgument.
class QuadraticNumber {
 public:
  QuadraticNumber() = default;
  QuadraticNumber(mpq_class a, mpq_class b, unsigned long d);
  static QuadraticNumber rational(mpq_class a, unsigned long d) { return {std::move(a), 0, d}; }

  const mpq_class& a() const { return a_; }
  const mpq_class& b() const { return b_; }
  unsigned long d() const { return d_; }
  bool is_rational() const { return b_ == 0; }

  // Exact sign of a + b*sqrt(d).
  int sign() const;
  // Exact floor, resolved by interval refinement plus exact sign tests.
  mpz_class floor() const;
  QuadraticNumber conjugate() const { return {a_, -b_, d_}; }
  // Field norm a^2 - d b^2 and trace 2a.
  mpq_class norm() const { return a_ * a_ - mpq_class(d_) * b_ * b_; }
  mpq_class trace() const { return 2 * a_; }

  BigFloat to_bigfloat(mpfr_bits precision) const;
  double to_double() const;
  std::string to_string() const;

  friend QuadraticNumber operator+(const QuadraticNumber& x, const QuadraticNumber& y);
  friend QuadraticNumber operator-(const QuadraticNumber& x, const QuadraticNumber& y);
  friend QuadraticNumber operator*(const QuadraticNumber& x, const QuadraticNumber& y);
  friend QuadraticNumber operator*(const QuadraticNumber& x, const mpq_class& s);
  friend QuadraticNumber operator-(const QuadraticNumber& x, const mpz_class& k);
  friend bool operator==(const QuadraticNumber& x, const QuadraticNumber& y);
  friend bool operator<(const QuadraticNumber& x, const QuadraticNumber& y) { return (x - y).sign() < 0; }

 private:
  static unsigned long common_field(const QuadraticNumber& x, const QuadraticNumber& y);

  mpq_class a_{0};
  mpq_class b_{0};
  unsigned long d_ = 5;
};

}  // namespace avglab
