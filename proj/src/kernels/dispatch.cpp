#include <cstdlib>
#include <string_view>

#include "avglab/error.hpp"
#include "avglab/kernels.hpp"

namespace avglab::kernels {

const char* to_string(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "unknown";
}

std::vector<const KernelTable*> available_tables() {
  std::vector<const KernelTable*> out{&scalar_table()};
  if (const KernelTable* t = avx2_table()) out.push_back(t);
  if (const KernelTable* t = neon_table()) out.push_back(t);
  return out;
}

namespace {

const KernelTable& choose() {
  const char* env = std::getenv("AVGLAB_SIMD");
  if (env != nullptr && *env != '\0') {
    const std::string_view want(env);
    for (const KernelTable* t : available_tables()) {
      if (want == to_string(t->isa)) return *t;
    }
    if (want != "auto") return scalar_table();
  }
  if (const KernelTable* t = avx2_table()) return *t;
  if (const KernelTable* t = neon_table()) return *t;
  return scalar_table();
}

}  // namespace

const KernelTable& active() {
  static const KernelTable& table = choose();
  return table;
}

GapExtrema gap_extrema(std::span<const double> sorted) { return active().gap_extrema(sorted.data(), sorted.size()); }

ComplexSum weyl_sum(std::span<const double> u, long k) { return active().weyl_sum(u.data(), u.size(), k); }

std::size_t count_below(std::span<const double> u, double threshold) {
  return active().count_below(u.data(), u.size(), threshold);
}

}  // namespace avglab::kernels
