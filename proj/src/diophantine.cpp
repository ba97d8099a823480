#include "avglab/diophantine.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "avglab/error.hpp"
#include "avglab/format.hpp"

namespace avglab {
namespace {

constexpr mpfr_bits kGuardBits = 64;

// Whichever of a, b is nearer to zero.
BigFloat closer(BigFloat a, BigFloat b) { return mpfr_cmpabs(b.raw(), a.raw()) < 0 ? std::move(b) : std::move(a); }

double floor_theta(const RealConstant& theta) {
  if (theta.is_rational()) {
    mpz_class f;
    mpz_fdiv_q(f.get_mpz_t(), theta.rational().get_num_mpz_t(), theta.rational().get_den_mpz_t());
    return f.get_d();
  }
  if (theta.is_quadratic()) return theta.quadratic().floor().get_d();
  return theta.to_bigfloat(256).floor().to_double();
}

}  // namespace

UniformlyDiscreteSet UniformlyDiscreteSet::lattice(RealConstant offset, RealConstant spacing) {
  if (!(spacing.to_double() > 0.0)) throw InvalidArgument("lattice spacing must be positive");
  UniformlyDiscreteSet s;
  s.min_gap_ = spacing.to_double();
  s.rep_ = Lattice{std::move(offset), std::move(spacing)};
  return s;
}

UniformlyDiscreteSet UniformlyDiscreteSet::finite(std::vector<RealConstant> points) {
  if (points.empty()) throw InvalidArgument("a finite point set must be non-empty");
  std::sort(points.begin(), points.end(),
            [](const RealConstant& a, const RealConstant& b) { return a.to_double() < b.to_double(); });
  Finite f;
  f.points = std::move(points);
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < f.points.size(); ++i) {
    f.approx.push_back(f.points[i].to_double());
    if (i > 0) {
      const BigFloat d = f.points[i].to_bigfloat(256) - f.points[i - 1].to_bigfloat(256);
      if (!(d.sign() > 0)) throw InvalidArgument("finite point set has a repeated point");
      gap = std::min(gap, d.to_double());
    }
  }
  UniformlyDiscreteSet s;
  s.min_gap_ = gap;
  s.rep_ = std::move(f);
  return s;
}

UniformlyDiscreteSet UniformlyDiscreteSet::beatty(RealConstant theta, RealConstant scale, RealConstant offset) {
  if (theta.is_rational()) throw InvalidArgument("Beatty slope theta must be irrational");
  if (!(theta.to_double() > 1.0)) throw InvalidArgument("Beatty slope theta must exceed 1");
  if (!(scale.to_double() > 0.0)) throw InvalidArgument("Beatty scale must be positive");
  UniformlyDiscreteSet s;
  s.min_gap_ = scale.to_double() * floor_theta(theta);
  s.rep_ = Beatty{std::move(theta), std::move(scale), std::move(offset)};
  return s;
}

UniformlyDiscreteSet UniformlyDiscreteSet::union_of(std::vector<UniformlyDiscreteSet> parts, double window) {
  if (parts.empty()) throw InvalidArgument("a union needs at least one part");
  double gap = std::numeric_limits<double>::infinity();
  for (const auto& p : parts) gap = std::min(gap, p.min_gap());
  for (std::size_t i = 0; i < parts.size(); ++i) {
    for (double y : parts[i].points_in(-window, window)) {
      for (std::size_t j = i + 1; j < parts.size(); ++j) gap = std::min(gap, parts[j].dist(y));
    }
  }
  if (!(gap > 0.0)) throw InvalidArgument("union parts share a point; the union is not uniformly discrete");
  UniformlyDiscreteSet s;
  s.min_gap_ = gap;
  s.rep_ = Union{std::move(parts)};
  return s;
}

UniformlyDiscreteSet::Kind UniformlyDiscreteSet::kind() const {
  return static_cast<Kind>(rep_.index());
}

double UniformlyDiscreteSet::density() const {
  return std::visit(
      [](const auto& r) -> double {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, Lattice>) {
          return 1.0 / r.spacing.to_double();
        } else if constexpr (std::is_same_v<T, Finite>) {
          return 0.0;
        } else if constexpr (std::is_same_v<T, Beatty>) {
          return 1.0 / (r.scale.to_double() * r.theta.to_double());
        } else {
          double d = 0.0;
          for (const auto& p : r.parts) d += p.density();
          return d;
        }
      },
      rep_);
}

std::size_t UniformlyDiscreteSet::cardinality() const {
  if (const auto* f = std::get_if<Finite>(&rep_)) return f->points.size();
  if (const auto* u = std::get_if<Union>(&rep_)) {
    std::size_t total = 0;
    for (const auto& p : u->parts) {
      const std::size_t c = p.cardinality();
      if (c == std::numeric_limits<std::size_t>::max()) return c;
      total += c;
    }
    return total;
  }
  return std::numeric_limits<std::size_t>::max();
}

double UniformlyDiscreteSet::offset(double x) const {
  return std::visit(
      [x](const auto& r) -> double {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, Lattice>) {
          const double l = r.spacing.to_double();
          const double t = (x - r.offset.to_double()) / l;
          const double f = t - std::floor(t);
          return (f <= 0.5 ? f : f - 1.0) * l;
        } else if constexpr (std::is_same_v<T, Finite>) {
          const auto it = std::lower_bound(r.approx.begin(), r.approx.end(), x);
          double best = std::numeric_limits<double>::infinity();
          if (it != r.approx.end()) best = x - *it;
          if (it != r.approx.begin() && std::fabs(x - *(it - 1)) < std::fabs(best)) best = x - *(it - 1);
          return best;
        } else if constexpr (std::is_same_v<T, Beatty>) {
          const double th = r.theta.to_double();
          const double s = r.scale.to_double();
          const double w = (x - r.offset.to_double()) / s;
          const double j0 = std::floor((std::floor(w) + 1.0) / th);
          double best = std::numeric_limits<double>::infinity();
          for (double j = j0 - 2.0; j <= j0 + 2.0; j += 1.0) {
            const double o = (w - std::floor(j * th)) * s;
            if (std::fabs(o) < std::fabs(best)) best = o;
          }
          return best;
        } else {
          double best = std::numeric_limits<double>::infinity();
          for (const auto& p : r.parts) {
            const double o = p.offset(x);
            if (std::fabs(o) < std::fabs(best)) best = o;
          }
          return best;
        }
      },
      rep_);
}

BigFloat UniformlyDiscreteSet::offset(const BigFloat& x) const {
  const mpfr_bits prec = x.precision() + kGuardBits;
  BigFloat xx(prec);
  mpfr_set(xx.raw(), x.raw(), MPFR_RNDN);
  return std::visit(
      [&](const auto& r) -> BigFloat {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, Lattice>) {
          const BigFloat l = r.spacing.to_bigfloat(prec);
          BigFloat f = ((xx - r.offset.to_bigfloat(prec)) / l).frac();
          if (mpfr_cmp_d(f.raw(), 0.5) > 0) f = f - BigFloat::from_double(1.0, prec);
          return f * l;
        } else if constexpr (std::is_same_v<T, Finite>) {
          const double xd = xx.to_double();
          const auto it = std::lower_bound(r.approx.begin(), r.approx.end(), xd);
          const auto k = static_cast<std::size_t>(it - r.approx.begin());
          const std::size_t lo = k >= 2 ? k - 2 : 0;
          const std::size_t hi = std::min(r.points.size(), k + 2);
          BigFloat best = xx - r.points[lo].to_bigfloat(prec);
          for (std::size_t i = lo + 1; i < hi; ++i) best = closer(best, xx - r.points[i].to_bigfloat(prec));
          return best;
        } else if constexpr (std::is_same_v<T, Beatty>) {
          const BigFloat th = r.theta.to_bigfloat(prec);
          const BigFloat s = r.scale.to_bigfloat(prec);
          const BigFloat w = (xx - r.offset.to_bigfloat(prec)) / s;
          BigFloat j = ((w.floor() + BigFloat::from_double(1.0, prec)) / th).floor();
          BigFloat best = w - (j * th).floor();
          for (long dj : {-2L, -1L, 1L, 2L}) {
            const BigFloat jj = j + BigFloat::from_double(static_cast<double>(dj), prec);
            best = closer(best, w - (jj * th).floor());
          }
          return best * s;
        } else {
          BigFloat best = r.parts.front().offset(x);
          for (std::size_t i = 1; i < r.parts.size(); ++i) best = closer(best, r.parts[i].offset(x));
          return best;
        }
      },
      rep_);
}

std::vector<double> UniformlyDiscreteSet::points_in(double lo, double hi) const {
  std::vector<double> out;
  if (!(lo <= hi)) return out;
  std::visit(
      [&](const auto& r) {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, Lattice>) {
          const double l = r.spacing.to_double();
          const double z = r.offset.to_double();
          for (double k = std::ceil((lo - z) / l) - 1.0; k <= std::floor((hi - z) / l) + 1.0; k += 1.0) {
            const double y = z + k * l;
            if (y >= lo && y <= hi) out.push_back(y);
          }
        } else if constexpr (std::is_same_v<T, Finite>) {
          for (double y : r.approx) {
            if (y >= lo && y <= hi) out.push_back(y);
          }
        } else if constexpr (std::is_same_v<T, Beatty>) {
          const double th = r.theta.to_double();
          const double s = r.scale.to_double();
          const double z = r.offset.to_double();
          const double jlo = std::floor((lo - z) / s / th) - 2.0;
          const double jhi = std::ceil((hi - z) / s / th) + 2.0;
          for (double j = jlo; j <= jhi; j += 1.0) {
            const double y = z + s * std::floor(j * th);
            if (y >= lo && y <= hi) out.push_back(y);
          }
        } else {
          for (const auto& p : r.parts) {
            const auto v = p.points_in(lo, hi);
            out.insert(out.end(), v.begin(), v.end());
          }
          std::sort(out.begin(), out.end());
        }
      },
      rep_);
  return out;
}

std::string UniformlyDiscreteSet::describe() const {
  return std::visit(
      [](const auto& r) -> std::string {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, Lattice>) {
          return "lattice(offset=" + r.offset.to_string() + ",spacing=" + r.spacing.to_string() + ")";
        } else if constexpr (std::is_same_v<T, Finite>) {
          std::string s = "finite(";
          for (std::size_t i = 0; i < r.points.size(); ++i) s += (i ? "," : "") + r.points[i].to_string();
          return s + ")";
        } else if constexpr (std::is_same_v<T, Beatty>) {
          return "beatty(theta=" + r.theta.to_string() + ",scale=" + r.scale.to_string() +
                 ",offset=" + r.offset.to_string() + ")";
        } else {
          std::string s = "union(";
          for (std::size_t i = 0; i < r.parts.size(); ++i) s += (i ? ";" : "") + r.parts[i].describe();
          return s + ")";
        }
      },
      rep_);
}

const char* to_string(DioVerdict v) {
  return v == DioVerdict::finite_violations ? "finite-violations" : "suspect-exceptional";
}

std::string DioScanReport::to_json() const {
  std::ostringstream out;
  out << "{\"alpha\":" << json_string(alpha) << ",\"x\":" << json_string(x) << ",\"epsilon\":" << json_number(epsilon)
      << ",\"N\":" << n << ",\"violations\":[";
  for (std::size_t i = 0; i < violations.size(); ++i) out << (i ? "," : "") << violations[i];
  out << "],\"hits\":[";
  for (std::size_t i = 0; i < hits.size(); ++i) out << (i ? "," : "") << hits[i];
  out << "],\"verdict\":" << json_string(to_string(verdict)) << ",\"budget\":" << json_number(budget) << "}";
  return out.str();
}

namespace {

enum class Comparison { below, above, indeterminate };

struct Classified {
  Comparison cmp;
  bool hit;
};

Classified classify(const FractionalOrbit& orbit, std::size_t n, const UniformlyDiscreteSet& y, double epsilon) {
  const BigFloat& u = orbit.unreduced(n - 1);
  const double err = orbit.unreduced_error(n - 1);
  const BigFloat d = y.dist(u);
  if (err == 0.0 && d.is_zero()) return {Comparison::below, true};
  const double thr = std::pow(static_cast<double>(n), -(1.0 + epsilon));
  const BigFloat t = BigFloat::from_double(thr, 64);
  BigFloat diff(d.precision());
  mpfr_sub(diff.raw(), d.raw(), t.raw(), MPFR_RNDN);
  const double margin = err + thr * 0x1.0p-48 + std::ldexp(1.0, -static_cast<int>(std::min<long>(d.precision(), 1000)) + 8);
  const double gap = diff.to_double();
  if (std::fabs(gap) <= margin) return {Comparison::indeterminate, false};
  return {gap < 0 ? Comparison::below : Comparison::above, false};
}

}  // namespace

DioScanReport dio_scan(const Multiplier& alpha, const SeedPoint& x, const UniformlyDiscreteSet& y, double epsilon,
                       std::size_t n, const DioScanOptions& options) {
  if (!(epsilon > 0.0)) throw InvalidArgument("dio_scan needs epsilon > 0");
  if (n == 0) throw InvalidArgument("dio_scan needs N >= 1");
  OrbitOptions oo = options.orbit;
  oo.retain_unreduced = true;
  FractionalOrbit orbit = generate_orbit(alpha, x, n, options.target_error, oo);

  DioScanReport r;
  r.alpha = alpha.to_string();
  r.x = x.to_string();
  r.epsilon = epsilon;
  r.n = n;

  std::vector<Classified> result(n + 1, {Comparison::indeterminate, false});
  std::vector<std::size_t> pending;
  for (std::size_t k = 1; k <= n; ++k) {
    result[k] = classify(orbit, k, y, epsilon);
    if (result[k].cmp == Comparison::indeterminate) pending.push_back(k);
  }
  while (!pending.empty()) {
    if (r.doublings_used >= options.max_doublings) {
      throw PrecisionBudgetExceeded("dio_scan: comparison at n = " + std::to_string(pending.front()) +
                                        " still indeterminate after " + std::to_string(options.max_doublings) +
                                        " precision doublings",
                                    2 * orbit.working_precision());
    }
    ++r.doublings_used;
    oo.extra_precision_bits += orbit.working_precision();
    orbit = generate_orbit(alpha, x, n, options.target_error, oo);
    std::vector<std::size_t> still;
    for (std::size_t k : pending) {
      result[k] = classify(orbit, k, y, epsilon);
      if (result[k].cmp == Comparison::indeterminate) still.push_back(k);
    }
    pending = std::move(still);
  }
  for (std::size_t k = 1; k <= n; ++k) {
    if (result[k].cmp == Comparison::below) r.violations.push_back(k);
    if (result[k].hit) r.hits.push_back(k);
  }
  r.verdict = DioVerdict::finite_violations;
  for (std::size_t k : r.violations) {
    if (3 * k > 2 * n) r.verdict = DioVerdict::suspect_exceptional;
  }
  mpz_class m;
  mpz_fdiv_q(m.get_mpz_t(), x.value().get_num_mpz_t(), x.value().get_den_mpz_t());
  r.budget = cantelli_budget(alpha, m.get_si(), y, epsilon, n);
  return r;
}

double cantelli_budget(const Multiplier& alpha, [[maybe_unused]] long m, const UniformlyDiscreteSet& y,
                       double epsilon, std::size_t n) {
  if (!(epsilon > 0.0)) throw InvalidArgument("cantelli_budget needs epsilon > 0");
  const double delta = y.min_gap();
  const std::size_t card = y.cardinality();
  const bool finite = card != std::numeric_limits<std::size_t>::max();
  const double l2a = alpha.abs_value_log2();
  double total = 0.0;
  for (std::size_t k = 1; k <= n; ++k) {
    const double lead = 2.0 / std::pow(static_cast<double>(k), 1.0 + epsilon);
    const double log2_a = static_cast<double>(k - 1) * l2a;
    double per;
    if (log2_a < 900.0) {
      const double a = std::exp2(log2_a);
      double count = 1.0 + std::floor(a / delta);
      if (finite) count = std::min(count, static_cast<double>(card));
      per = count / a;
    } else if (finite) {
      per = static_cast<double>(card) * std::exp2(-log2_a);
    } else {
      // (1 + [A/delta]) / A <= 1/A + 1/delta
      per = std::exp2(-log2_a) + 1.0 / delta;
    }
    total += lead * per;
  }
  return total;
}

}  // namespace avglab
