#include <cmath>
#include <limits>
#include <numbers>

#include "avglab/diophantine.hpp"
#include "avglab/error.hpp"
#include "avglab/rng.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace avglab;

namespace {

constexpr double kTau = 1.6180339887498948482;

RealConstant rc(const char* s) { return RealConstant::parse(s); }

}  // namespace

TEST_CASE("distance examples") {
  const auto z = UniformlyDiscreteSet::integers();
  CHECK(z.dist(0.3) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(z.dist(std::pow(kTau, 4)) == doctest::Approx(std::pow(kTau, -4)).epsilon(1e-12));
  CHECK(z.dist(std::pow(kTau, 4)) == doctest::Approx(0.145898).epsilon(1e-6));
  const auto f = UniformlyDiscreteSet::finite({rc("0"), rc("10")});
  CHECK(f.dist(2.5) == 2.5);
  CHECK(f.min_gap() == 10.0);
  CHECK(f.dist(-4.0) == 4.0);
  CHECK(f.dist(13.0) == 3.0);
}

TEST_CASE("big-float distance agrees with doubles and resolves huge points") {
  const auto z = UniformlyDiscreteSet::integers();
  // tau^60 + tau^-60 is the Lucas number L_60, so dist(tau^60, Z) = tau^-60.
  const BigFloat tau = RealConstant::golden_ratio().to_bigfloat(400);
  BigFloat p = BigFloat::from_double(1.0, 400);
  for (int i = 0; i < 60; ++i) p = p * tau;
  CHECK(z.dist(p).to_double() == doctest::Approx(std::pow(kTau, -60)).epsilon(1e-12));
  const auto b = UniformlyDiscreteSet::beatty(rc("sqrt(2)"), rc("1/2"), rc("1/3"));
  CounterRng rng(3, 0);
  for (int i = 0; i < 200; ++i) {
    const double x = rng.uniform(-50.0, 50.0);
    CHECK(b.dist(BigFloat::from_double(x, 200)).to_double() == doctest::Approx(b.dist(x)).epsilon(1e-12));
  }
}

TEST_CASE("zero distance exactly on members") {
  const auto lat = UniformlyDiscreteSet::lattice(rc("1/4"), rc("1/2"));
  const auto fin = UniformlyDiscreteSet::finite({rc("-1.5"), rc("0.25"), rc("7")});
  const auto bea = UniformlyDiscreteSet::beatty(rc("tau"), rc("1"), rc("0"));
  const auto uni = UniformlyDiscreteSet::union_of({UniformlyDiscreteSet::integers(), UniformlyDiscreteSet::lattice(rc("1/2"), rc("3"))});
  for (const auto* s : {&lat, &fin, &bea, &uni}) {
    INFO(s->describe());
    for (double y : s->points_in(-20, 20)) {
      CHECK(s->contains(y));
      CHECK(s->dist(BigFloat::from_double(y, 128)).is_zero());
      CHECK(s->dist(y + 1e-3) > 0.0);
      CHECK_FALSE(s->contains(y + s->min_gap() / 3));
    }
  }
}

TEST_CASE("union distance never exceeds a part's distance") {
  const auto a = UniformlyDiscreteSet::lattice(rc("0"), rc("3"));
  const auto b = UniformlyDiscreteSet::beatty(rc("sqrt(3)"), rc("1"), rc("1/7"));
  const auto u = UniformlyDiscreteSet::union_of({a, b}, 200.0);
  CounterRng rng(8, 0);
  for (int i = 0; i < 500; ++i) {
    const double x = rng.uniform(-100, 100);
    CHECK(u.dist(x) <= a.dist(x));
    CHECK(u.dist(x) <= b.dist(x));
  }
  CHECK(u.min_gap() > 0.0);
  CHECK(u.min_gap() <= std::min(a.min_gap(), b.min_gap()));
  CHECK(u.density() == doctest::Approx(1.0 / 3 + 1.0 / std::sqrt(3.0)));
  CHECK_THROWS_AS(UniformlyDiscreteSet::union_of({UniformlyDiscreteSet::integers(),
                                                  UniformlyDiscreteSet::lattice(rc("0"), rc("2"))}),
                  InvalidArgument);
}

TEST_CASE("Beatty gap matches a brute-force minimum") {
  for (const char* th : {"sqrt(2)", "tau", "pi", "sqrt(7)", "1+sqrt(3)"}) {
    const auto b = UniformlyDiscreteSet::beatty(rc(th), rc("1"), rc("0"));
    const auto pts = b.points_in(0.0, 1e4 * RealConstant::parse(th).to_double());
    REQUIRE(pts.size() >= 10000);
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < 10000; ++i) gap = std::min(gap, pts[i] - pts[i - 1]);
    INFO(th);
    CHECK(gap == b.min_gap());
  }
  CHECK_THROWS_AS(UniformlyDiscreteSet::beatty(rc("3/2")), InvalidArgument);
  CHECK_THROWS_AS(UniformlyDiscreteSet::beatty(rc("sqrt(2)-1")), InvalidArgument);
}

TEST_CASE("dio_scan: golden ratio from 1 is exceptional") {
  const auto r = dio_scan(Multiplier::parse("tau"), SeedPoint::parse("1"), UniformlyDiscreteSet::integers(), 0.1, 50);
  REQUIRE(!r.violations.empty());
  std::vector<std::size_t> want;
  for (std::size_t n = 5; n <= 50; ++n) want.push_back(n);
  std::vector<std::size_t> late(r.violations.begin(), r.violations.end());
  late.erase(std::remove_if(late.begin(), late.end(), [](std::size_t n) { return n < 5; }), late.end());
  CHECK(late == want);
  CHECK(std::pow(kTau, -4) < std::pow(5.0, -1.1));
  CHECK(std::pow(kTau, -3) > std::pow(4.0, -1.1));
  // n = 1 (x = 1 is an integer) and n = 2 (0.382 < 2^-1.1) violate as well.
  CHECK(r.violations.front() == 1);
  CHECK(r.violations[1] == 2);
  CHECK(r.violations[2] == 5);
  CHECK(r.hits == std::vector<std::size_t>{1});
  CHECK(r.verdict == DioVerdict::suspect_exceptional);
}

TEST_CASE("dio_scan: doubling 1/3 never violates") {
  const auto r = dio_scan(Multiplier::parse("2"), SeedPoint::parse("1/3"), UniformlyDiscreteSet::integers(), 0.1, 50);
  // dist is always 1/3; the threshold n^-1.1 exceeds 1/3 only for n = 1, 2.
  CHECK(r.violations == std::vector<std::size_t>{1, 2});
  CHECK(r.hits.empty());
  CHECK(r.verdict == DioVerdict::finite_violations);
}

TEST_CASE("dio_scan: dyadic seeds hit the integers") {
  const auto r = dio_scan(Multiplier::parse("2"), SeedPoint::parse("1/2"), UniformlyDiscreteSet::integers(), 0.1, 10);
  // alpha^(n-1) x = 2^(n-2): an integer from n = 2 on.
  REQUIRE(!r.hits.empty());
  CHECK(r.hits.front() == 2);
  CHECK(r.hits.size() == 9);
  CHECK(r.violations.size() == 10);  // n = 1: dist 1/2 < 1
  const auto j = nlohmann::json::parse(r.to_json());
  CHECK(j["verdict"] == "suspect-exceptional");
  CHECK(j["hits"].size() == 9);
  CHECK(j["N"] == 10);
}

TEST_CASE("dio_scan on a Beatty set with a quadratic multiplier") {
  const auto y = UniformlyDiscreteSet::beatty(rc("sqrt(2)"), rc("1"), rc("0"));
  const auto r = dio_scan(Multiplier::parse("3/2"), SeedPoint::sampled(1, 2, 1, 2, 2048), y, 0.5, 300);
  for (std::size_t n : r.violations) {
    CHECK(n >= 1);
    CHECK(n <= 300);
  }
  CHECK(r.budget > 0.0);
}

TEST_CASE("cantelli budget") {
  const auto z = UniformlyDiscreteSet::integers();
  const Multiplier two = Multiplier::parse("2");
  // eps = 1, |alpha| = 2, delta = 1: sum 2/n^2 (2^(1-n) + 1) = pi^2/3 + 4 Li2(1/2)
  const double li2_half = std::numbers::pi * std::numbers::pi / 12 - std::log(2.0) * std::log(2.0) / 2;
  const double limit = std::numbers::pi * std::numbers::pi / 3 + 4 * li2_half;
  const double b = cantelli_budget(two, 1, z, 1.0, 2000000);
  CHECK(b == doctest::Approx(limit).epsilon(1e-6));
  CHECK(b <= limit);
  CHECK(cantelli_budget(two, 1, z, 1.0, 10) <= cantelli_budget(two, 1, z, 1.0, 20));
  // a single far-away point: bracket term vanishes
  const auto far = UniformlyDiscreteSet::finite({rc("1000")});
  const double g = cantelli_budget(two, 1, far, 1.0, 60);
  double want = 0.0;
  for (int n = 1; n <= 60; ++n) want += 2.0 / (n * n) / std::pow(2.0, n - 1);
  CHECK(g == doctest::Approx(want).epsilon(1e-14));
  // monotone in N for a large multiplier as well
  const Multiplier big = Multiplier::parse("3/2");
  double prev = 0.0;
  for (std::size_t n : {1u, 10u, 100u, 1000u, 10000u}) {
    const double v = cantelli_budget(big, 1, z, 0.5, n);
    CHECK(v >= prev);
    prev = v;
  }
}
