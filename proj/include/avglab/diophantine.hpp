#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <variant>
#include <vector>

#include "avglab/bigfloat.hpp"
#include "avglab/constant.hpp"
#include "avglab/orbit.hpp"
#include "avglab/seed_point.hpp"

namespace avglab {

// A point set Y with inf |y - y'| >= min_gap() > 0.
class UniformlyDiscreteSet {
 public:
  enum class Kind { lattice, finite, beatty, union_of };

  // {offset + k spacing : k in Z}
  static UniformlyDiscreteSet lattice(RealConstant offset, RealConstant spacing);
  static UniformlyDiscreteSet integers() { return lattice(RealConstant(0L), RealConstant(1L)); }
  static UniformlyDiscreteSet finite(std::vector<RealConstant> points);
  // {offset + scale floor(j theta) : j in Z} for irrational theta > 1.
  // Consecutive gaps are scale*floor(theta) or scale*ceil(theta).
  static UniformlyDiscreteSet beatty(RealConstant theta, RealConstant scale = RealConstant(1L),
                                     RealConstant offset = RealConstant(0L));
  // The gap across parts is checked on [-window, window]; beyond that it is
  // assumed (exact for lattices with commensurable spacings).
  static UniformlyDiscreteSet union_of(std::vector<UniformlyDiscreteSet> parts, double window = 1e4);

  Kind kind() const;
  double min_gap() const { return min_gap_; }
  // Asymptotic number of points per unit length.
  double density() const;
  // Number of points; SIZE_MAX for infinite sets.
  std::size_t cardinality() const;

  double dist(double x) const { return std::fabs(offset(x)); }
  // Distance at the precision of x plus guard bits.
  BigFloat dist(const BigFloat& x) const { return offset(x).abs(); }
  // x - y for a nearest point y.
  double offset(double x) const;
  BigFloat offset(const BigFloat& x) const;
  bool contains(double x) const { return dist(x) == 0.0; }
  // Points in [lo, hi], ascending.
  std::vector<double> points_in(double lo, double hi) const;
  std::string describe() const;

 private:
  struct Lattice {
    RealConstant offset;
    RealConstant spacing;
  };
  struct Finite {
    std::vector<RealConstant> points;  // ascending
    std::vector<double> approx;
  };
  struct Beatty {
    RealConstant theta;
    RealConstant scale;
    RealConstant offset;
  };
  struct Union {
    std::vector<UniformlyDiscreteSet> parts;
  };

  std::variant<Lattice, Finite, Beatty, Union> rep_;
  double min_gap_ = 0.0;
};

enum class DioVerdict { finite_violations, suspect_exceptional };
const char* to_string(DioVerdict v);

struct DioScanOptions {
  double target_error = 0x1.0p-40;
  // Precision doublings allowed for comparisons inside the error band.
  int max_doublings = 3;
  OrbitOptions orbit;
};

struct DioScanReport {
  std::string alpha;
  std::string x;
  double epsilon = 0.0;
  std::size_t n = 0;
  // n with dist(alpha^(n-1) x, Y) < n^-(1+eps); includes hits.
  std::vector<std::size_t> violations;
  // n with alpha^(n-1) x in Y (certified: exact value and zero distance).
  std::vector<std::size_t> hits;
  DioVerdict verdict = DioVerdict::finite_violations;
  double budget = 0.0;
  int doublings_used = 0;

  // {alpha, x, epsilon, N, violations, hits, verdict, budget}
  std::string to_json() const;
};

// Scans n = 1..N. The verdict is suspect_exceptional when a violation has
// n > 2N/3.
DioScanReport dio_scan(const Multiplier& alpha, const SeedPoint& x, const UniformlyDiscreteSet& y, double epsilon,
                       std::size_t n, const DioScanOptions& options = {});

// sum_{n=1}^{N} (1/A)(2/n^(1+eps))(1 + [A/delta]),  A = |alpha|^(n-1),
// bounding the measure of x in [m, m+1] that violate at some n <= N. The
// bracket count is capped at |Y| for finite sets. The bound is the same for
// every m.
double cantelli_budget(const Multiplier& alpha, long m, const UniformlyDiscreteSet& y, double epsilon,
                       std::size_t n);

}  // namespace avglab
