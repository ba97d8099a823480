#include "avglab/equidistribution.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "avglab/error.hpp"
#include "avglab/format.hpp"
#include "avglab/kernels.hpp"

namespace avglab {
namespace {

// Candidate sets larger than this fall back to sup G - inf G.
constexpr std::size_t kMaxCandidatePairs = 1 << 16;
constexpr double kCandidateSlack = 1e-12;

std::vector<double> sorted_copy(std::span<const double> entries) {
  if (entries.empty()) throw InvalidArgument("discrepancy of an empty orbit is undefined");
  std::vector<double> u(entries.begin(), entries.end());
  std::sort(u.begin(), u.end());
  return u;
}

// An endpoint of an interval: position v with c points strictly to its left.
struct Endpoint {
  std::size_t c;
  double v;
};

double pair_deviation(const Endpoint& a, const Endpoint& b, double nn) {
  const double dc = static_cast<double>(static_cast<long long>(b.c) - static_cast<long long>(a.c));
  return std::fabs(dc / nn - (b.v - a.v));
}

double star_from_extrema(const kernels::GapExtrema& g) { return std::max(g.max_plus, -g.min_minus); }

// Extreme discrepancy of sorted u, given the kernel's gap extrema.
double extreme_sorted(const std::vector<double>& u, const kernels::GapExtrema& g) {
  const std::size_t n = u.size();
  const double nn = static_cast<double>(n);
  // G(t) = #{u < t}/N - t is 0 at both ends of [0,1].
  const double gmax = std::max(0.0, g.max_plus);
  const double gmin = std::min(0.0, g.min_minus);

  std::vector<Endpoint> high;
  std::vector<Endpoint> low;
  if (gmax <= kCandidateSlack) high.push_back({0, 0.0});
  if (-gmin <= kCandidateSlack) low.push_back({0, 0.0});
  for (std::size_t i = 0; i < n; ++i) {
    if (static_cast<double>(i + 1) / nn - u[i] >= gmax - kCandidateSlack) high.push_back({i + 1, u[i]});
    if (static_cast<double>(i) / nn - u[i] <= gmin + kCandidateSlack) low.push_back({i, u[i]});
  }
  if (high.size() * low.size() > kMaxCandidatePairs) return gmax - gmin;
  double best = 0.0;
  for (const Endpoint& a : high) {
    for (const Endpoint& b : low) best = std::max(best, pair_deviation(a, b, nn));
  }
  // The right end (N, 1) pairs with either side.
  const Endpoint top{n, 1.0};
  for (const Endpoint& a : high) best = std::max(best, pair_deviation(a, top, nn));
  for (const Endpoint& b : low) best = std::max(best, pair_deviation(b, top, nn));
  return best;
}

std::vector<Endpoint> all_endpoints(std::span<const double> entries) {
  const std::size_t n = entries.size();
  std::vector<Endpoint> pts{{0, 0.0}, {n, 1.0}};
  for (double v : entries) {
    std::size_t below = 0;
    std::size_t at_most = 0;
    for (double w : entries) {
      below += w < v ? 1 : 0;
      at_most += w <= v ? 1 : 0;
    }
    pts.push_back({below, v});
    pts.push_back({at_most, v});
  }
  return pts;
}

}  // namespace

DiscrepancyPair discrepancies(std::span<const double> entries) {
  const std::vector<double> u = sorted_copy(entries);
  const kernels::GapExtrema g = kernels::gap_extrema(u);
  return {star_from_extrema(g), extreme_sorted(u, g)};
}

double star_discrepancy(std::span<const double> entries) {
  const std::vector<double> u = sorted_copy(entries);
  return star_from_extrema(kernels::gap_extrema(u));
}

double star_discrepancy(const FractionalOrbit& orbit) { return star_discrepancy(orbit.entries()); }

double extreme_discrepancy(std::span<const double> entries) { return discrepancies(entries).extreme; }

double extreme_discrepancy(const FractionalOrbit& orbit) { return extreme_discrepancy(orbit.entries()); }

double extreme_discrepancy_bruteforce(std::span<const double> entries) {
  if (entries.empty()) throw InvalidArgument("discrepancy of an empty orbit is undefined");
  const std::vector<Endpoint> pts = all_endpoints(entries);
  const double nn = static_cast<double>(entries.size());
  double best = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = i + 1; j < pts.size(); ++j) best = std::max(best, pair_deviation(pts[i], pts[j], nn));
  }
  return best;
}

double star_discrepancy_bruteforce(std::span<const double> entries) {
  if (entries.empty()) throw InvalidArgument("discrepancy of an empty orbit is undefined");
  const std::vector<Endpoint> pts = all_endpoints(entries);
  const double nn = static_cast<double>(entries.size());
  double best = 0.0;
  for (const Endpoint& p : pts) best = std::max(best, pair_deviation({0, 0.0}, p, nn));
  return best;
}

std::complex<double> weyl_sum(std::span<const double> entries, long k) {
  if (entries.empty()) throw InvalidArgument("Weyl sum of an empty orbit is undefined");
  if (k == 0) return {1.0, 0.0};
  const kernels::ComplexSum s = kernels::weyl_sum(entries, k);
  const double nn = static_cast<double>(entries.size());
  return {s.re / nn, s.im / nn};
}

std::complex<double> weyl_sum(const FractionalOrbit& orbit, long k) { return weyl_sum(orbit.entries(), k); }

double erdos_turan_bound(std::span<const double> entries, long max_k) {
  if (max_k < 1) throw InvalidArgument("Erdos-Turan bound needs K >= 1");
  const double k1 = static_cast<double>(max_k + 1);
  double sum = 0.0;
  for (long k = 1; k <= max_k; ++k) sum += (1.0 / static_cast<double>(k) - 1.0 / k1) * std::abs(weyl_sum(entries, k));
  return 6.0 / k1 + 4.0 / std::numbers::pi * sum;
}

std::string DiscrepancyReport::to_json() const {
  std::ostringstream out;
  out << "{\"N\":" << n << ",\"star\":" << json_number(star) << ",\"extreme\":" << json_number(extreme)
      << ",\"weyl\":[";
  bool first = true;
  for (const auto& [k, w] : weyl) {
    out << (first ? "" : ",") << "{\"k\":" << k << ",\"re\":" << json_number(w.real())
        << ",\"im\":" << json_number(w.imag()) << "}";
    first = false;
  }
  out << "],\"trace\":[";
  first = true;
  for (const DiscrepancyCheckpoint& c : trace) {
    out << (first ? "" : ",") << "{\"N\":" << c.n << ",\"star\":" << json_number(c.star)
        << ",\"extreme\":" << json_number(c.extreme) << "}";
    first = false;
  }
  out << "]}";
  return out.str();
}

DiscrepancyReport discrepancy_report(const FractionalOrbit& orbit, const std::vector<long>& weyl_ks,
                                     const std::vector<std::size_t>& schedule) {
  DiscrepancyReport r;
  r.n = orbit.size();
  const DiscrepancyPair d = discrepancies(orbit.entries());
  r.star = d.star;
  r.extreme = d.extreme;
  for (long k : weyl_ks) r.weyl[k] = weyl_sum(orbit, k);
  std::size_t last = 0;
  for (std::size_t m : schedule) {
    if (m <= last || m > orbit.size()) {
      throw InvalidArgument("trace schedule must be strictly increasing and within the orbit length");
    }
    const DiscrepancyPair p = discrepancies(orbit.prefix(m));
    r.trace.push_back({m, p.star, p.extreme});
    last = m;
  }
  return r;
}

UdBoundFit ud_bound_check(const std::vector<DiscrepancyCheckpoint>& trace, double epsilon) {
  if (trace.empty()) throw InvalidArgument("ud_bound_check needs a nonempty trace");
  if (!(epsilon > 0.0)) throw InvalidArgument("ud_bound_check needs epsilon > 0");
  UdBoundFit fit;
  for (const DiscrepancyCheckpoint& c : trace) {
    if (c.n < 3) throw InvalidArgument("ud_bound_check needs N_i >= 3, got " + std::to_string(c.n));
    const double nn = static_cast<double>(c.n);
    fit.ratios.push_back(c.star * std::sqrt(nn) / std::pow(std::log(nn), 1.5 + epsilon));
  }
  const std::size_t m = fit.ratios.size();
  const std::size_t first_end = (m + 1) / 2;
  const std::size_t last_begin = m / 2;
  const double first_max = *std::max_element(fit.ratios.begin(), fit.ratios.begin() + first_end);
  const double last_max = *std::max_element(fit.ratios.begin() + last_begin, fit.ratios.end());
  fit.c_hat = *std::max_element(fit.ratios.begin(), fit.ratios.end());
  for (std::size_t i = 0; i < m; ++i) fit.within_bound.push_back(i < first_end || fit.ratios[i] <= 2.0 * first_max);
  fit.pass = last_max <= 2.0 * first_max;
  return fit;
}

namespace {

char digit_char(unsigned d) {
  return static_cast<char>(d < 10 ? '0' + d : 'a' + (d - 10));
}

unsigned digit_value(char c) {
  if (c >= '0' && c <= '9') return static_cast<unsigned>(c - '0');
  if (c >= 'a' && c <= 'z') return static_cast<unsigned>(c - 'a') + 10;
  throw InvalidArgument(std::string("bad digit '") + c + "'");
}

}  // namespace

std::string BlockFrequencies::label(std::size_t block) const {
  std::string s(block_length, '0');
  for (std::size_t i = block_length; i-- > 0;) {
    s[i] = digit_char(static_cast<unsigned>(block % base));
    block /= base;
  }
  return s;
}

double BlockFrequencies::operator[](const std::string& block) const {
  if (block.size() != block_length) throw InvalidArgument("block '" + block + "' has the wrong length");
  std::size_t idx = 0;
  for (char c : block) {
    const unsigned d = digit_value(c);
    if (d >= base) throw InvalidArgument("block '" + block + "' has a digit outside the base");
    idx = idx * base + d;
  }
  return frequency[idx];
}

BlockFrequencies digit_block_frequencies(const SeedPoint& x, unsigned base, std::size_t block_length,
                                         std::size_t digits) {
  if (base < 2 || base > 36) throw InvalidArgument("digit base must lie in [2, 36]");
  if (block_length < 1) throw InvalidArgument("block length must be >= 1");
  if (digits < block_length) throw InvalidArgument("need at least as many digits as the block length");
  const double blocks_d = std::pow(static_cast<double>(base), static_cast<double>(block_length));
  if (blocks_d > 16777216.0) throw InvalidArgument("too many distinct blocks (base^length > 2^24)");
  if (const auto& prov = x.provenance()) {
    const double bits_needed = static_cast<double>(digits) * std::log2(static_cast<double>(base));
    if (bits_needed > static_cast<double>(prov->random_bits)) {
      throw InvalidArgument("sampled x carries " + std::to_string(prov->random_bits) + " random bits but " +
                            std::to_string(digits) + " base-" + std::to_string(base) + " digits need " +
                            std::to_string(static_cast<long long>(std::ceil(bits_needed))));
    }
  }

  mpz_class fl;
  mpz_fdiv_q(fl.get_mpz_t(), x.value().get_num_mpz_t(), x.value().get_den_mpz_t());
  const mpq_class frac = x.value() - mpq_class(fl);
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), base, digits);
  mpz_class scaled = frac.get_num() * scale;
  mpz_fdiv_q(scaled.get_mpz_t(), scaled.get_mpz_t(), frac.get_den_mpz_t());
  std::string s = scaled == 0 ? std::string() : scaled.get_str(static_cast<int>(base));
  s.insert(0, digits - s.size(), '0');

  BlockFrequencies out;
  out.base = base;
  out.block_length = block_length;
  out.digits = digits;
  const auto nblocks = static_cast<std::size_t>(blocks_d);
  std::vector<std::size_t> counts(nblocks, 0);
  std::size_t top = 1;
  for (std::size_t i = 1; i < block_length; ++i) top *= base;
  std::size_t window = 0;
  for (std::size_t i = 0; i < digits; ++i) {
    if (i >= block_length) window -= digit_value(s[i - block_length]) * top;
    window = window * base + digit_value(s[i]);
    if (i + 1 >= block_length) ++counts[window];
  }
  const double windows = static_cast<double>(digits - block_length + 1);
  out.frequency.resize(nblocks);
  for (std::size_t b = 0; b < nblocks; ++b) out.frequency[b] = static_cast<double>(counts[b]) / windows;
  return out;
}

}  // namespace avglab
