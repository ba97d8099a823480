#pragma once

#include <complex>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "avglab/orbit.hpp"
#include "avglab/seed_point.hpp"

namespace avglab {

// Exact star discrepancy over anchored intervals [0,a):
//   max_i max(i/N - u_(i), u_(i) - (i-1)/N)  for sorted u.
double star_discrepancy(std::span<const double> entries);
double star_discrepancy(const FractionalOrbit& orbit);

// Exact extreme discrepancy over all [a,b) in [0,1].
double extreme_discrepancy(std::span<const double> entries);
double extreme_discrepancy(const FractionalOrbit& orbit);

// Both at once from a single sort.
struct DiscrepancyPair {
  double star;
  double extreme;
};
DiscrepancyPair discrepancies(std::span<const double> entries);

// O(N^2) reference over every pair of endpoints taken from {0, 1} and each
// point together with its right limit.
double extreme_discrepancy_bruteforce(std::span<const double> entries);
double star_discrepancy_bruteforce(std::span<const double> entries);

// (1/N) sum_n exp(2 pi i k entries[n]); exactly 1 for k = 0.
std::complex<double> weyl_sum(std::span<const double> entries, long k);
std::complex<double> weyl_sum(const FractionalOrbit& orbit, long k);

// Erdos-Turan upper bound on D_N from the first K Weyl sums:
//   6/(K+1) + (4/pi) sum_{k<=K} (1/k - 1/(K+1)) |W_k|.
double erdos_turan_bound(std::span<const double> entries, long max_k);

struct DiscrepancyCheckpoint {
  std::size_t n;
  double star;
  double extreme;
};

struct DiscrepancyReport {
  std::size_t n = 0;
  double star = 0.0;
  double extreme = 0.0;
  std::map<long, std::complex<double>> weyl;
  std::vector<DiscrepancyCheckpoint> trace;

  // {"N":..,"star":..,"extreme":..,"weyl":[{"k":..,"re":..,"im":..}],
  //  "trace":[{"N":..,"star":..,"extreme":..}]} with 17 significant digits.
  std::string to_json() const;
};

// Report for the whole orbit; `schedule` (strictly increasing, each <= N)
// fills the trace from prefixes.
DiscrepancyReport discrepancy_report(const FractionalOrbit& orbit, const std::vector<long>& weyl_ks,
                                     const std::vector<std::size_t>& schedule = {});

struct UdBoundFit {
  double c_hat = 0.0;
  std::vector<double> ratios;      // r_i = star_i sqrt(N_i) / (ln N_i)^(3/2+eps)
  std::vector<bool> within_bound;  // r_i <= 2 * max of the first half
  bool pass = false;               // max over the last half <= 2 * max over the first half
};

// Diagnostic for the bound O((log N)^(3/2+eps) / sqrt N). Not a theorem check.
UdBoundFit ud_bound_check(const std::vector<DiscrepancyCheckpoint>& trace, double epsilon);

struct BlockFrequencies {
  unsigned base = 2;
  std::size_t block_length = 1;
  std::size_t digits = 0;
  // Indexed by the block read as a base-q integer, most significant digit first.
  std::vector<double> frequency;

  std::string label(std::size_t block) const;
  double operator[](const std::string& block) const;
};

// Sliding-window frequencies of length-l blocks among the first N base-q
// digits of <x>. Sampled points carry only random_bits bits, so asking for
// more than random_bits / log2(q) digits is rejected.
BlockFrequencies digit_block_frequencies(const SeedPoint& x, unsigned base, std::size_t block_length,
                                         std::size_t digits);

}  // namespace avglab
