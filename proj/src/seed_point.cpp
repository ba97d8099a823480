#include "avglab/seed_point.hpp"

#include "avglab/constant.hpp"
#include "avglab/error.hpp"
#include "avglab/rng.hpp"

namespace avglab {

SeedPoint SeedPoint::exact(mpq_class x) {
  SeedPoint p;
  x.canonicalize();
  p.value_ = std::move(x);
  return p;
}

SeedPoint SeedPoint::parse(const std::string& text) {
  const RealConstant c = RealConstant::parse(text);
  if (!c.is_rational()) throw InvalidArgument("seed point must be rational (exact), got '" + text + "'");
  return exact(c.rational());
}

SeedPoint SeedPoint::sampled(std::uint64_t seed, std::uint64_t index, const mpq_class& lo, const mpq_class& hi,
                             std::uint64_t random_bits) {
  if (!(lo < hi)) throw InvalidArgument("sampling interval must satisfy lo < hi");
  if (random_bits == 0) throw InvalidArgument("sampling needs at least one random bit");
  const CounterRng rng(seed, index);
  const std::uint64_t words = (random_bits + 63) / 64;
  mpz_class u = 0;
  for (std::uint64_t j = 0; j < words; ++j) {
    u <<= 64;
    const std::uint64_t w = rng.word(j);
    u += mpz_class(static_cast<unsigned long>(w >> 32)) << 32;
    u += static_cast<unsigned long>(w & 0xffffffffULL);
  }
  u >>= static_cast<mp_bitcnt_t>(words * 64 - random_bits);
  mpq_class frac(u);
  mpq_div_2exp(frac.get_mpq_t(), frac.get_mpq_t(), static_cast<mp_bitcnt_t>(random_bits));
  SeedPoint p = exact(lo + (hi - lo) * frac);
  p.provenance_ = SampleProvenance{seed, index, lo, hi, random_bits};
  return p;
}

std::string SeedPoint::to_string() const {
  if (provenance_) {
    return "sampled(seed=" + std::to_string(provenance_->seed) + ",index=" + std::to_string(provenance_->index) +
           ",bits=" + std::to_string(provenance_->random_bits) + ")";
  }
  return value_.get_str();
}

}  // namespace avglab
