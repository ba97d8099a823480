#include "avglab/constant.hpp"

#include <cctype>
#include <cmath>
#include <limits>

#include "avglab/error.hpp"

namespace avglab {
namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

// Exact rational from "12", "-3/4", "1.25", "2.5e-3".
bool parse_rational(const std::string& raw, mpq_class& out) {
  const std::string s = trim(raw);
  if (s.empty()) return false;
  const auto slash = s.find('/');
  if (slash != std::string::npos) {
    mpq_class num;
    mpq_class den;
    if (!parse_rational(s.substr(0, slash), num) || !parse_rational(s.substr(slash + 1), den)) return false;
    if (den == 0) throw InvalidArgument("zero denominator in '" + s + "'");
    out = num / den;
    return true;
  }
  std::size_t i = 0;
  bool neg = false;
  if (s[i] == '+' || s[i] == '-') neg = s[i++] == '-';
  std::string digits;
  long exp10 = 0;
  bool seen_dot = false;
  bool any_digit = false;
  for (; i < s.size(); ++i) {
    const char c = s[i];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      digits.push_back(c);
      any_digit = true;
      if (seen_dot) --exp10;
    } else if (c == '.' && !seen_dot) {
      seen_dot = true;
    } else if (c == 'e' || c == 'E') {
      try {
        std::size_t used = 0;
        exp10 += std::stol(s.substr(i + 1), &used);
        if (used != s.size() - i - 1) return false;
      } catch (const std::exception&) {
        return false;
      }
      i = s.size();
      break;
    } else {
      return false;
    }
  }
  if (!any_digit) return false;
  mpz_class mant(digits, 10);
  mpz_class pow10;
  mpz_ui_pow_ui(pow10.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(exp10)));
  out = exp10 >= 0 ? mpq_class(mant * pow10) : mpq_class(mant, pow10);
  out.canonicalize();
  if (neg) out = -out;
  return true;
}

// Splits d = s^2 * core with core square-free.
void split_square(unsigned long d, unsigned long& square_root_part, unsigned long& core) {
  square_root_part = 1;
  core = d;
  for (unsigned long p = 2; p * p <= core; ++p) {
    while (core % (p * p) == 0) {
      core /= p * p;
      square_root_part *= p;
    }
  }
}

// "c*sqrt(d)" or "sqrt(d)" with optional leading sign; returns coefficient
// and radicand.
bool parse_surd_term(const std::string& raw, mpq_class& coef, unsigned long& d) {
  std::string s = trim(raw);
  const auto pos = s.find("sqrt(");
  if (pos == std::string::npos || s.back() != ')') return false;
  std::string head = trim(s.substr(0, pos));
  const std::string inner = s.substr(pos + 5, s.size() - pos - 6);
  mpq_class radicand;
  if (!parse_rational(inner, radicand) || radicand.get_den() != 1 || radicand <= 0) return false;
  d = radicand.get_num().get_ui();
  if (!head.empty() && head.back() == '*') head = trim(head.substr(0, head.size() - 1));
  if (head.empty() || head == "+") {
    coef = 1;
  } else if (head == "-") {
    coef = -1;
  } else if (!parse_rational(head, coef)) {
    return false;
  }
  return true;
}

}  // namespace

BigFloat BigFloatSource::evaluate(mpfr_bits precision) const {
  BigFloat v(precision);
  if (expr == "pi") {
    v = BigFloat::pi(precision);
  } else if (expr == "e") {
    v = BigFloat::euler_e(precision);
  } else {
    if (mpfr_set_str(v.raw(), expr.c_str(), 10, MPFR_RNDN) != 0) {
      throw InvalidArgument("cannot evaluate big-float constant '" + expr + "'");
    }
  }
  return negate ? -v : v;
}

RealConstant::RealConstant(mpq_class q) : value_(std::move(q)) { cache(); }

RealConstant::RealConstant(QuadraticNumber q) {
  if (q.is_rational()) {
    value_ = q.a();
  } else {
    value_ = std::move(q);
  }
  cache();
}

RealConstant::RealConstant(BigFloatSource s) : value_(std::move(s)) {
  // Validates the expression eagerly.
  cache();
}

RealConstant RealConstant::golden_ratio() { return RealConstant(QuadraticNumber(mpq_class(1, 2), mpq_class(1, 2), 5)); }

RealConstant RealConstant::parse(const std::string& raw) {
  std::string s = trim(raw);
  if (s.empty()) throw InvalidArgument("empty real constant");
  if (s == "tau" || s == "phi" || s == "golden") return golden_ratio();
  bool neg = false;
  std::string body = s;
  if (body[0] == '-' && (body.substr(1) == "pi" || body.substr(1) == "e")) {
    neg = true;
    body = body.substr(1);
  }
  if (body == "pi" || body == "e") return RealConstant(BigFloatSource{body, neg});
  if (s.rfind("float:", 0) == 0) {
    std::string lit = trim(s.substr(6));
    bool n = false;
    if (!lit.empty() && lit[0] == '-') {
      n = true;
      lit = lit.substr(1);
    }
    mpq_class check;
    if (!parse_rational(lit, check)) throw InvalidArgument("bad big-float literal '" + s + "'");
    return RealConstant(BigFloatSource{lit, n});
  }
  mpq_class q;
  if (parse_rational(s, q)) return RealConstant(q);
  if (s.find("sqrt(") != std::string::npos) {
    // Split "a +/- c*sqrt(d)" at the sign preceding the surd term.
    const auto pos = s.find("sqrt(");
    std::size_t split = std::string::npos;
    for (std::size_t i = pos; i-- > 1;) {
      if (s[i] == '+' || s[i] == '-') {
        // Skip exponent signs like 1e-3.
        if (s[i - 1] == 'e' || s[i - 1] == 'E') continue;
        split = i;
        break;
      }
    }
    mpq_class a = 0;
    std::string surd = s;
    if (split != std::string::npos) {
      if (!parse_rational(s.substr(0, split), a)) throw InvalidArgument("cannot parse real constant '" + s + "'");
      surd = s.substr(split);
    }
    mpq_class coef;
    unsigned long d = 0;
    if (!parse_surd_term(surd, coef, d)) throw InvalidArgument("cannot parse real constant '" + s + "'");
    unsigned long sq = 1;
    unsigned long core = d;
    split_square(d, sq, core);
    coef *= sq;
    if (core == 1) return RealConstant(mpq_class(a + coef));
    return RealConstant(QuadraticNumber(a, coef, core));
  }
  throw InvalidArgument("cannot parse real constant '" + s + "'");
}

void RealConstant::cache() {
  const BigFloat v = to_bigfloat(160);
  approx_ = v.to_double();
  if (v.is_zero()) {
    abs_log2_ = -std::numeric_limits<double>::infinity();
    return;
  }
  BigFloat l(160);
  mpfr_abs(l.raw(), v.raw(), MPFR_RNDN);
  mpfr_log2(l.raw(), l.raw(), MPFR_RNDN);
  abs_log2_ = l.to_double();
}

BigFloat RealConstant::to_bigfloat(mpfr_bits precision) const {
  return std::visit(
      [precision](const auto& v) -> BigFloat {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, mpq_class>) {
          return BigFloat::from_mpq(v, precision);
        } else if constexpr (std::is_same_v<T, BigFloatSource>) {
          return v.evaluate(precision);
        } else {
          return v.to_bigfloat(precision);
        }
      },
      value_);
}

bool RealConstant::is_integer() const { return is_rational() && rational().get_den() == 1; }

std::string RealConstant::to_string() const {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, mpq_class>) {
          return v.get_str();
        } else if constexpr (std::is_same_v<T, QuadraticNumber>) {
          return v.to_string();
        } else {
          return (v.negate ? "-" : "") + (v.expr == "pi" || v.expr == "e" ? v.expr : "float:" + v.expr);
        }
      },
      value_);
}

bool operator==(const RealConstant& x, const RealConstant& y) {
  if (x.value_.index() == y.value_.index() && !x.is_bigfloat()) {
    if (x.is_rational()) return x.rational() == y.rational();
    return x.quadratic() == y.quadratic();
  }
  if (x.is_bigfloat() || y.is_bigfloat()) {
    return x.to_bigfloat(256) == y.to_bigfloat(256);
  }
  return false;  // a rational never equals an irrational surd
}

Multiplier::Multiplier(RealConstant value) : value_(std::move(value)) {
  if (!(value_.abs_log2() > 0.0)) {
    throw InvalidArgument("Multiplier invariant violated: |alpha| > 1 required, got alpha = " + value_.to_string());
  }
  // |alpha| slightly above 1 can still round to log2 = 0 in double; check exactly.
  const BigFloat v = value_.to_bigfloat(256).abs();
  if (v <= BigFloat::from_double(1.0, 256)) {
    throw InvalidArgument("Multiplier invariant violated: |alpha| > 1 required, got alpha = " + value_.to_string());
  }
}

}  // namespace avglab
