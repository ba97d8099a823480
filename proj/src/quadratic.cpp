#include "avglab/quadratic.hpp"

#include <algorithm>
#include <cmath>

#include "avglab/error.hpp"

namespace avglab {

bool is_square_free(unsigned long d) {
  if (d == 0) return false;
  for (unsigned long p = 2; p * p <= d; ++p) {
    if (d % (p * p) == 0) return false;
  }
  return true;
}

QuadraticNumber::QuadraticNumber(mpq_class a, mpq_class b, unsigned long d)
    : a_(std::move(a)), b_(std::move(b)), d_(d) {
  a_.canonicalize();
  b_.canonicalize();
  if (d_ < 2 || !is_square_free(d_)) {
    throw InvalidArgument("quadratic field radicand must be a square-free integer > 1, got " + std::to_string(d_));
  }
}

unsigned long QuadraticNumber::common_field(const QuadraticNumber& x, const QuadraticNumber& y) {
  if (x.d_ == y.d_) return x.d_;
  if (x.is_rational()) return y.d_;
  if (y.is_rational()) return x.d_;
  throw InvalidArgument("arithmetic between different quadratic fields");
}

int QuadraticNumber::sign() const {
  const int sa = sgn(a_);
  const int sb = sgn(b_);
  if (sb == 0) return sa;
  if (sa == 0 || sa == sb) return sb;
  // Opposite signs: compare a^2 with d b^2.
  const int cmp_sq = cmp(a_ * a_, mpq_class(d_) * b_ * b_);
  if (cmp_sq == 0) return 0;  // impossible for square-free d, kept for safety
  return cmp_sq > 0 ? sa : sb;
}

mpz_class QuadraticNumber::floor() const {
  if (is_rational()) {
    mpz_class q;
    mpz_fdiv_q(q.get_mpz_t(), a_.get_num_mpz_t(), a_.get_den_mpz_t());
    return q;
  }
  const auto size_bits = static_cast<mpfr_bits>(
      mpz_sizeinbase(a_.get_num_mpz_t(), 2) + mpz_sizeinbase(a_.get_den_mpz_t(), 2) +
      mpz_sizeinbase(b_.get_num_mpz_t(), 2) + mpz_sizeinbase(b_.get_den_mpz_t(), 2));
  const BigFloat approx = to_bigfloat(size_bits + 64);
  mpz_class k;
  mpfr_get_z(k.get_mpz_t(), approx.raw(), MPFR_RNDD);
  // The approximation is within one unit; fix up with exact comparisons.
  while ((*this - k).sign() < 0) --k;
  while ((*this - mpz_class(k + 1)).sign() >= 0) ++k;
  return k;
}

BigFloat QuadraticNumber::to_bigfloat(mpfr_bits precision) const {
  const mpfr_bits work = precision + 32;
  BigFloat root = BigFloat::from_mpz(mpz_class(static_cast<unsigned long>(d_)), work).sqrt();
  BigFloat r = BigFloat::from_mpq(a_, work) + BigFloat::from_mpq(b_, work) * root;
  r.round_to(precision);
  return r;
}

double QuadraticNumber::to_double() const {
  if (is_rational()) return a_.get_d();
  return to_bigfloat(128).to_double();
}

std::string QuadraticNumber::to_string() const {
  if (is_rational()) return a_.get_str();
  return a_.get_str() + "+" + b_.get_str() + "*sqrt(" + std::to_string(d_) + ")";
}

QuadraticNumber operator+(const QuadraticNumber& x, const QuadraticNumber& y) {
  return {x.a_ + y.a_, x.b_ + y.b_, QuadraticNumber::common_field(x, y)};
}

QuadraticNumber operator-(const QuadraticNumber& x, const QuadraticNumber& y) {
  return {x.a_ - y.a_, x.b_ - y.b_, QuadraticNumber::common_field(x, y)};
}

QuadraticNumber operator*(const QuadraticNumber& x, const QuadraticNumber& y) {
  const unsigned long d = QuadraticNumber::common_field(x, y);
  return {x.a_ * y.a_ + mpq_class(d) * x.b_ * y.b_, x.a_ * y.b_ + x.b_ * y.a_, d};
}

QuadraticNumber operator*(const QuadraticNumber& x, const mpq_class& s) { return {x.a_ * s, x.b_ * s, x.d_}; }

QuadraticNumber operator-(const QuadraticNumber& x, const mpz_class& k) { return {x.a_ - k, x.b_, x.d_}; }

bool operator==(const QuadraticNumber& x, const QuadraticNumber& y) {
  if (x.is_rational() && y.is_rational()) return x.a_ == y.a_;
  return x.d_ == y.d_ && x.a_ == y.a_ && x.b_ == y.b_;
}

}  // namespace avglab
