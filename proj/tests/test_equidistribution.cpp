#include <algorithm>
#include <cmath>
#include <numbers>

#include "avglab/equidistribution.hpp"
#include "avglab/error.hpp"
#include "avglab/rng.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace avglab;

namespace {

std::vector<double> random_instance(std::uint64_t id) {
  CounterRng rng(2024, id);
  const std::size_t n = 1 + rng.next_u64() % 200;
  const int style = static_cast<int>(rng.next_u64() % 4);
  std::vector<double> v(n);
  for (double& x : v) {
    x = rng.uniform();
    if (style == 1) x = std::floor(x * 16.0) / 16.0;  // many ties
    if (style == 2) x = std::floor(x * static_cast<double>(n)) / static_cast<double>(n);
  }
  if (style == 3) {
    // clusters and exact duplicates
    for (std::size_t i = 1; i < n; i += 3) v[i] = v[i - 1];
  }
  return v;
}

}  // namespace

TEST_CASE("star discrepancy examples") {
  CHECK(star_discrepancy(std::vector<double>{0.125, 0.375, 0.625, 0.875}) == 0.125);
  CHECK(star_discrepancy(std::vector<double>{0.0, 0.25, 0.5, 0.75}) == 0.25);
  CHECK(star_discrepancy(std::vector<double>{0.0}) == 1.0);
  CHECK_THROWS_AS(star_discrepancy(std::vector<double>{}), InvalidArgument);
}

TEST_CASE("extreme discrepancy examples") {
  CHECK(extreme_discrepancy(std::vector<double>{0.125, 0.375, 0.625, 0.875}) == 0.25);
  CHECK(extreme_discrepancy(std::vector<double>{0.5}) == 1.0);
  CHECK(extreme_discrepancy(std::vector<double>{0.3, 0.3, 0.3}) == 1.0);
  CHECK(extreme_discrepancy_bruteforce(std::vector<double>{0.125, 0.375, 0.625, 0.875}) == 0.25);
  CHECK(extreme_discrepancy_bruteforce(std::vector<double>{0.5}) == 1.0);
  CHECK(extreme_discrepancy_bruteforce(std::vector<double>{0.3, 0.3, 0.3}) == 1.0);
}

TEST_CASE("sweep equals the brute force on random instances") {
  for (std::uint64_t id = 0; id < 200; ++id) {
    const auto v = random_instance(id);
    const DiscrepancyPair d = discrepancies(v);
    INFO("instance " << id << " N=" << v.size());
    CHECK(d.extreme == extreme_discrepancy_bruteforce(v));
    CHECK(d.star == star_discrepancy_bruteforce(v));
    CHECK(d.star > 0.0);
    CHECK(d.star <= d.extreme);
    CHECK(d.extreme <= 2.0 * d.star);
    CHECK(d.extreme <= 1.0);
  }
}

TEST_CASE("translation invariance of the extreme discrepancy") {
  CounterRng rng(77, 0);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> v(64);
    for (double& x : v) x = static_cast<double>(rng.next_u64() % 256) / 256.0;
    const double c = static_cast<double>(rng.next_u64() % 256) / 256.0;
    std::vector<double> w(v);
    for (double& x : w) x = std::fmod(x + c, 1.0);
    CHECK(extreme_discrepancy(v) == extreme_discrepancy(w));
  }
}

TEST_CASE("weyl sums") {
  const std::vector<double> any{0.1, 0.7, 0.3};
  CHECK(weyl_sum(any, 0) == std::complex<double>(1.0, 0.0));
  const auto w = weyl_sum(std::vector<double>{0.0, 0.5, 0.0, 0.5}, 1);
  CHECK(std::abs(w) < 1e-15);
  const auto q = weyl_sum(std::vector<double>{0.25, 0.25}, 2);
  CHECK(q.real() == doctest::Approx(-1.0));
  CHECK(std::fabs(q.imag()) < 1e-15);
  for (std::uint64_t id = 0; id < 20; ++id) {
    const auto v = random_instance(id);
    for (long k = -3; k <= 3; ++k) CHECK(std::abs(weyl_sum(v, k)) <= 1.0 + 1e-15);
  }
}

TEST_CASE("Erdos-Turan bound dominates and co-trends") {
  for (std::uint64_t id = 0; id < 40; ++id) {
    const auto v = random_instance(id);
    CHECK(extreme_discrepancy(v) <= erdos_turan_bound(v, 8));
  }
  const auto o = generate_orbit(Multiplier::parse("3/2"), SeedPoint::sampled(1, 0, 1, 2, 2048), 1000, 0x1.0p-40);
  const std::vector<double> flat(1000, 0.4);
  CHECK(erdos_turan_bound(o.entries(), 30) < erdos_turan_bound(flat, 30));
  CHECK(star_discrepancy(o) < star_discrepancy(flat));
}

TEST_CASE("report and json") {
  const auto o = generate_orbit(Multiplier::parse("2"), SeedPoint::sampled(3, 1, 1, 2, 600), 400, 0x1.0p-40);
  const DiscrepancyReport r = discrepancy_report(o, {0, 1, -1, 2}, {10, 100, 400});
  CHECK(r.n == 400);
  CHECK(r.weyl.at(0) == std::complex<double>(1.0, 0.0));
  REQUIRE(r.trace.size() == 3);
  CHECK(r.trace.back().star == r.star);
  const auto j = nlohmann::json::parse(r.to_json());
  CHECK(j["N"] == 400);
  CHECK(j["star"].get<double>() == r.star);
  CHECK(j["extreme"].get<double>() == r.extreme);
  CHECK(j["weyl"].size() == 4);
  CHECK(j["trace"][1]["N"] == 100);
  CHECK_THROWS_AS(discrepancy_report(o, {}, {10, 10}), InvalidArgument);
  CHECK_THROWS_AS(discrepancy_report(o, {}, {500}), InvalidArgument);
}

TEST_CASE("ud bound check") {
  std::vector<DiscrepancyCheckpoint> exact;
  std::vector<DiscrepancyCheckpoint> slow;
  std::vector<DiscrepancyCheckpoint> flat;
  for (double n : {1e2, 1e3, 1e4, 1e5, 1e6}) {
    const auto N = static_cast<std::size_t>(n);
    const double s = std::pow(std::log(n), 1.6) / std::sqrt(n);
    exact.push_back({N, s, s});
    slow.push_back({N, std::pow(n, -0.1), std::pow(n, -0.1)});
    flat.push_back({N, 1.0, 1.0});
  }
  const UdBoundFit a = ud_bound_check(exact, 0.1);
  CHECK(a.c_hat == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(a.pass);
  CHECK_FALSE(ud_bound_check(slow, 0.1).pass);
  const UdBoundFit c = ud_bound_check(flat, 0.1);
  CHECK_FALSE(c.pass);
  CHECK_FALSE(c.within_bound.back());
  CHECK_THROWS_AS(ud_bound_check({{2, 0.5, 0.5}}, 0.1), InvalidArgument);
  CHECK_THROWS_AS(ud_bound_check({}, 0.1), InvalidArgument);
  CHECK_THROWS_AS(ud_bound_check(exact, 0.0), InvalidArgument);
}

TEST_CASE("digit blocks of 1/3") {
  const SeedPoint third = SeedPoint::parse("1/3");
  const auto f1 = digit_block_frequencies(third, 2, 1, 1000);
  CHECK(f1["0"] == 0.5);
  CHECK(f1["1"] == 0.5);
  const auto f2 = digit_block_frequencies(third, 2, 2, 1001);
  CHECK(f2["01"] == 0.5);
  CHECK(f2["10"] == 0.5);
  CHECK(f2["00"] == 0.0);
  CHECK(f2["11"] == 0.0);
  CHECK(f2.label(1) == "01");
  const auto z = digit_block_frequencies(SeedPoint::parse("0"), 7, 1, 50);
  CHECK(z["0"] == 1.0);
  // 1/7 = 0.142857... in base 10
  const auto d = digit_block_frequencies(SeedPoint::parse("22/7"), 10, 1, 600);
  for (char c : std::string("142857")) CHECK(d[std::string(1, c)] == doctest::Approx(1.0 / 6));
  CHECK(d["0"] == 0.0);
}

TEST_CASE("digit blocks of sampled points") {
  const SeedPoint x = SeedPoint::sampled(5, 0, 1, 2, 4096);
  CHECK_THROWS_AS(digit_block_frequencies(x, 2, 1, 5000), InvalidArgument);
  CHECK_THROWS_AS(digit_block_frequencies(x, 10, 1, 2000), InvalidArgument);
  const auto f = digit_block_frequencies(x, 2, 2, 4096);
  double total = 0.0;
  for (double p : f.frequency) total += p;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
  for (double p : f.frequency) CHECK(std::fabs(p - 0.25) < 0.05);
}
