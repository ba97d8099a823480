#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <string>

namespace avglab {

struct SampleProvenance {
  std::uint64_t seed = 0;
  std::uint64_t index = 0;
  mpq_class lo;
  mpq_class hi;
  std::uint64_t random_bits = 0;
};

// Starting point x of an orbit, held as an exact rational. Sampled points
// are lo + (hi - lo) * U / 2^bits, where U takes its bits most-significant
// first from the counter RNG substream (seed, index); sampling with more bits
// refines the same point.
class SeedPoint {
 public:
  static SeedPoint exact(mpq_class x);
  // Accepts the forms of RealConstant::parse that are rational.
  static SeedPoint parse(const std::string& text);
  static SeedPoint sampled(std::uint64_t seed, std::uint64_t index, const mpq_class& lo, const mpq_class& hi,
                           std::uint64_t random_bits);

  const mpq_class& value() const { return value_; }
  double to_double() const { return value_.get_d(); }
  bool is_sampled() const { return provenance_.has_value(); }
  const std::optional<SampleProvenance>& provenance() const { return provenance_; }
  std::string to_string() const;

 private:
  mpq_class value_;
  std::optional<SampleProvenance> provenance_;
};

}  // namespace avglab
