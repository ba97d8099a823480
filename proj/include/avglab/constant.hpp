#pragma once

#include <gmpxx.h>

#include <string>
#include <variant>

#include "avglab/bigfloat.hpp"
#include "avglab/quadratic.hpp"

namespace avglab {

// A real number known only through an evaluator that can produce it at any
// precision: a named constant ("pi", "e") or a decimal literal.
struct BigFloatSource {
  std::string expr;
  bool negate = false;
  BigFloat evaluate(mpfr_bits precision) const;
  friend bool operator==(const BigFloatSource&, const BigFloatSource&) = default;
};

// Real constant with an exact representation where one exists. Used for
// multipliers, frequencies, lattice parameters and Beatty slopes.
class RealConstant {
 public:
  using Storage = std::variant<mpq_class, QuadraticNumber, BigFloatSource>;

  RealConstant() : value_(mpq_class(0)) {}
  RealConstant(mpq_class q);  // NOLINT(google-explicit-constructor)
  RealConstant(long v) : RealConstant(mpq_class(v)) {}  // NOLINT(google-explicit-constructor)
  RealConstant(QuadraticNumber q);  // NOLINT(google-explicit-constructor)
  RealConstant(BigFloatSource s);  // NOLINT(google-explicit-constructor)

  // Accepted forms: integers, "p/q", exact decimals ("1.25"), "tau"/"phi",
  // "pi", "e", "float:<decimal>", and quadratic surds such as "sqrt(2)",
  // "1/2+1/2*sqrt(5)", "3-2*sqrt(2)".
  static RealConstant parse(const std::string& text);
  static RealConstant golden_ratio();

  const Storage& storage() const { return value_; }
  bool is_rational() const { return std::holds_alternative<mpq_class>(value_); }
  bool is_quadratic() const { return std::holds_alternative<QuadraticNumber>(value_); }
  bool is_bigfloat() const { return std::holds_alternative<BigFloatSource>(value_); }
  const mpq_class& rational() const { return std::get<mpq_class>(value_); }
  const QuadraticNumber& quadratic() const { return std::get<QuadraticNumber>(value_); }

  BigFloat to_bigfloat(mpfr_bits precision) const;
  double to_double() const { return approx_; }
  // log2 |value|; -inf for zero.
  double abs_log2() const { return abs_log2_; }
  bool is_integer() const;
  std::string to_string() const;

  friend bool operator==(const RealConstant& x, const RealConstant& y);

 private:
  void cache();

  Storage value_;
  double approx_ = 0.0;
  double abs_log2_ = 0.0;
};

// The multiplier alpha of the exponential orbit; |alpha| > 1.
class Multiplier {
 public:
  explicit Multiplier(RealConstant value);
  static Multiplier parse(const std::string& text) { return Multiplier(RealConstant::parse(text)); }

  const RealConstant& value() const { return value_; }
  double to_double() const { return value_.to_double(); }
  double abs_value_log2() const { return value_.abs_log2(); }
  std::string to_string() const { return value_.to_string(); }

 private:
  RealConstant value_;
};

}  // namespace avglab
