#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "avglab/bigfloat.hpp"
#include "avglab/constant.hpp"
#include "avglab/seed_point.hpp"

namespace avglab {

enum class OrbitMode { exponential, beta_transform, general };

// How the entries were produced; recorded for provenance and tests.
enum class OrbitPath {
  exact_rational,          // exact integer quotient/remainder recurrence
  quadratic_recurrence,    // integer linear recurrence of the minimal polynomial
  quadratic_coefficients,  // alpha^n = c_n alpha + d_n with exact rationals
  bigfloat,                // rounded MPFR products with a propagated bound
  exact_field,             // exact arithmetic in Q or Q(sqrt d) (beta orbits)
  fast_double,             // machine precision, uncertified
  external,                // user-supplied entries
};

enum class BetaMode { certified, fast };

const char* to_string(OrbitMode mode);
const char* to_string(OrbitPath path);

std::size_t default_precision_budget_bytes();

struct OrbitOptions {
  // Keep the unreduced values alpha^n x (needed for non-periodic functions,
  // modulus-L subsampling and distance scans against general point sets).
  bool retain_unreduced = false;
  // x = 0 gives the constant zero orbit and is rejected unless allowed.
  bool allow_zero_seed = false;
  // Memory budget for the working state; defaults to
  // default_precision_budget_bytes().
  std::optional<std::size_t> budget_bytes;
  // Extra guard bits on top of the working precision (raises the accuracy of
  // the unreduced values; entries stay doubles).
  long long extra_precision_bits = 0;
};

// Working precision (bits) for a certified orbit of length N:
//   ceil(N log2|alpha|) + ceil(log2(|x|+2)) + ceil(log2 N) + ceil(-log2 target) + 32.
long long orbit_working_precision(double abs_alpha_log2, double abs_x, std::size_t n, double target_error);

// The sequence <u_n x> in [0,1), optionally scaled: the represented values are
// entries[n] * scale in [0, scale).
class FractionalOrbit {
 public:
  FractionalOrbit() = default;
  // Wraps externally produced entries (each must lie in [0,1)).
  static FractionalOrbit from_entries(std::vector<double> entries, std::string description = "external",
                                      double guaranteed_abs_error = 0.0);

  std::span<const double> entries() const { return entries_; }
  std::span<const double> prefix(std::size_t n) const;
  double operator[](std::size_t i) const { return entries_[i]; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  OrbitMode mode() const { return mode_; }
  OrbitPath path() const { return path_; }
  const std::string& description() const { return description_; }
  // Certified bound on |entry - exact| (circle metric for entries next to
  // 0 or 1); +inf for fast-mode orbits.
  double guaranteed_abs_error() const { return guaranteed_abs_error_; }
  double scale() const { return scale_; }
  long long working_precision() const { return working_precision_; }

  bool has_unreduced() const { return !unreduced_.empty(); }
  // Unreduced value u_n x (before reduction modulo the scale).
  const BigFloat& unreduced(std::size_t i) const;
  // Bound on |unreduced(i) - exact|; zero when the value is exact.
  double unreduced_error(std::size_t i) const;

 private:
  friend class OrbitBuilder;

  std::vector<double> entries_;
  std::vector<BigFloat> unreduced_;
  std::vector<double> unreduced_errors_;
  OrbitMode mode_ = OrbitMode::exponential;
  OrbitPath path_ = OrbitPath::external;
  std::string description_;
  double guaranteed_abs_error_ = 0.0;
  double scale_ = 1.0;
  long long working_precision_ = 53;
};

// Entries <alpha^n x>, n = 0..N-1, each within target_error of the exact
// value. target_error must lie in [2^-52, 2^-20]; entries are doubles, so
// 2^-52 is the finest meaningful request.
FractionalOrbit generate_orbit(const Multiplier& alpha, const SeedPoint& x, std::size_t n, double target_error,
                               const OrbitOptions& options = {});

// Entries T^n x for T(y) = alpha y mod 1, x in [0,1).
FractionalOrbit beta_orbit(const Multiplier& alpha, const SeedPoint& x, std::size_t n, BetaMode mode,
                           double target_error = 0x1.0p-40, const OrbitOptions& options = {});

// u_n = alpha^(k m + l), m = 0, 1, ...; consecutive powers of |alpha| > 1 are
// separated, which is what the metric equidistribution statement needs.
class GeneralSequence {
 public:
  GeneralSequence(Multiplier base, std::size_t stride = 1, std::size_t offset = 0);

  const Multiplier& base() const { return base_; }
  std::size_t stride() const { return stride_; }
  std::size_t offset() const { return offset_; }
  // inf_{n != m} |u_n - u_m| > 0.
  double separation_gap() const;
  // u_m as a double (for checks on small indices).
  double term(std::size_t m) const;
  std::string describe() const;

 private:
  Multiplier base_;
  std::size_t stride_;
  std::size_t offset_;
};

// Orbit <u_m x> for m = 0..N-1.
FractionalOrbit generate_general(const GeneralSequence& seq, const SeedPoint& x, std::size_t n, double target_error,
                                 const OrbitOptions& options = {});

// Every k-th entry starting at l, reduced modulo `modulus` (entries are
// normalised to [0,1) with scale = modulus). A modulus other than the
// orbit's scale needs the unreduced values.
FractionalOrbit subsample(const FractionalOrbit& orbit, std::size_t stride, std::size_t offset, double modulus = 1.0);

// "n,frac" with 18 significant digits.
void write_orbit_csv(std::ostream& out, const FractionalOrbit& orbit);

}  // namespace avglab
