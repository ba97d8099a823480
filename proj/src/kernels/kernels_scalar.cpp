#include <algorithm>
#include <cmath>
#include <numbers>

#include "avglab/kernels.hpp"
#include "kernels_internal.hpp"

namespace avglab::kernels {
namespace {

GapExtrema gap_extrema_scalar(const double* sorted, std::size_t n) {
  const auto nn = static_cast<double>(n);
  double max_plus = -2.0;
  double min_minus = 2.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double upper = static_cast<double>(i + 1) / nn;
    const double lower = static_cast<double>(i) / nn;
    max_plus = std::max(max_plus, upper - sorted[i]);
    min_minus = std::min(min_minus, lower - sorted[i]);
  }
  return {max_plus, min_minus};
}

ComplexSum weyl_sum_scalar(const double* u, std::size_t n, long k) {
  const auto kk = static_cast<double>(k);
  NeumaierSum re;
  NeumaierSum im;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = kk * u[i];
    const double r = t - std::nearbyint(t);
    const double angle = 2.0 * std::numbers::pi * r;
    re.add(std::cos(angle));
    im.add(std::sin(angle));
  }
  return {re.value(), im.value()};
}

std::size_t count_below_scalar(const double* u, std::size_t n, double threshold) {
  std::size_t c = 0;
  for (std::size_t i = 0; i < n; ++i) c += u[i] < threshold ? 1 : 0;
  return c;
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{Isa::scalar, &gap_extrema_scalar, &weyl_sum_scalar, &count_below_scalar};
  return table;
}

}  // namespace avglab::kernels
