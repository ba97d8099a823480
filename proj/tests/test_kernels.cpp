#include <algorithm>
#include <cmath>
#include <vector>

#include "avglab/kernels.hpp"
#include "avglab/rng.hpp"
#include "doctest.h"

using namespace avglab;
using namespace avglab::kernels;

namespace {

std::vector<double> random_points(std::uint64_t seed, std::size_t n) {
  CounterRng rng(seed, 0);
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform();
  return v;
}

}  // namespace

TEST_CASE("scalar table is always present and first") {
  const auto tables = available_tables();
  REQUIRE(!tables.empty());
  CHECK(tables.front()->isa == Isa::scalar);
  CHECK(std::string(to_string(active().isa)).size() > 0);
}

TEST_CASE("variants match the scalar reference") {
  const KernelTable& ref = scalar_table();
  for (const KernelTable* t : available_tables()) {
    INFO("isa=" << to_string(t->isa));
    for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 7u, 8u, 33u, 1000u, 4099u}) {
      auto u = random_points(n + 17, n);
      // a few exact duplicates and boundary values
      if (n > 4) {
        u[1] = u[0];
        u[2] = 0.0;
        u[3] = 0.5;
      }
      for (long k : {0L, 1L, -1L, 2L, 5L, 37L, 1000003L}) {
        const ComplexSum a = ref.weyl_sum(u.data(), n, k);
        const ComplexSum b = t->weyl_sum(u.data(), n, k);
        const double tol = 1e-13 * std::max<double>(1.0, static_cast<double>(n));
        CHECK(std::fabs(a.re - b.re) <= tol);
        CHECK(std::fabs(a.im - b.im) <= tol);
      }
      for (double thr : {0.0, 0.25, 0.5, u.empty() ? 0.3 : u[0], 1.0}) {
        CHECK(ref.count_below(u.data(), n, thr) == t->count_below(u.data(), n, thr));
      }
      std::sort(u.begin(), u.end());
      if (n > 0) {
        const GapExtrema a = ref.gap_extrema(u.data(), n);
        const GapExtrema b = t->gap_extrema(u.data(), n);
        CHECK(a.max_plus == b.max_plus);
        CHECK(a.min_minus == b.min_minus);
      }
    }
  }
}

TEST_CASE("weyl kernel values") {
  const std::vector<double> half{0.0, 0.5, 0.0, 0.5};
  for (const KernelTable* t : available_tables()) {
    const ComplexSum s = t->weyl_sum(half.data(), 4, 1);
    CHECK(std::fabs(s.re) < 1e-15);
    CHECK(std::fabs(s.im) < 1e-15);
    const std::vector<double> q(9, 0.25);
    const ComplexSum r = t->weyl_sum(q.data(), 9, 2);
    CHECK(r.re == doctest::Approx(-9.0));
    CHECK(std::fabs(r.im) < 1e-14);
  }
}

TEST_CASE("polynomial sincos tracks libm") {
  for (const KernelTable* t : available_tables()) {
    auto u = random_points(99, 4096);
    for (long k : {1L, 3L}) {
      for (std::size_t i = 0; i < u.size(); i += 97) {
        const ComplexSum s = t->weyl_sum(&u[i], 1, k);
        CHECK(std::fabs(s.re - std::cos(2 * M_PI * k * u[i])) < 1e-14);
        CHECK(std::fabs(s.im - std::sin(2 * M_PI * k * u[i])) < 1e-14);
      }
    }
  }
}
