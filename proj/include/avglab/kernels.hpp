#pragma once

// Data-parallel inner loops. Every kernel has a scalar reference
// implementation; AVX2 (x86-64) and NEON (AArch64) variants are compiled
// when the toolchain supports them and picked at runtime. The environment
// variable AVGLAB_SIMD=scalar|avx2|neon forces a variant.

#include <cstddef>
#include <span>
#include <vector>

namespace avglab::kernels {

enum class Isa { scalar, avx2, neon };

const char* to_string(Isa isa);

// For sorted u_(1) <= ... <= u_(N):
//   max_plus  = max_i ( i/N - u_(i) )
//   min_minus = min_i ( (i-1)/N - u_(i) )
struct GapExtrema {
  double max_plus;
  double min_minus;
};

struct ComplexSum {
  double re;
  double im;
};

struct KernelTable {
  Isa isa;
  GapExtrema (*gap_extrema)(const double* sorted, std::size_t n);
  // sum_j exp(2 pi i k u_j), compensated.
  ComplexSum (*weyl_sum)(const double* u, std::size_t n, long k);
  // #{ j : u_j < threshold }.
  std::size_t (*count_below)(const double* u, std::size_t n, double threshold);
};

const KernelTable& scalar_table();
// nullptr when the variant is not compiled in or the CPU lacks it.
const KernelTable* avx2_table();
const KernelTable* neon_table();

// Variants usable on this machine, scalar first.
std::vector<const KernelTable*> available_tables();

// The table used by the library; chosen once per process.
const KernelTable& active();

// Convenience wrappers over active().
GapExtrema gap_extrema(std::span<const double> sorted);
ComplexSum weyl_sum(std::span<const double> u, long k);
std::size_t count_below(std::span<const double> u, double threshold);

}  // namespace avglab::kernels
