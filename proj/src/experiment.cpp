#include "avglab/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "avglab/averaging.hpp"
#include "avglab/diophantine.hpp"
#include "avglab/equidistribution.hpp"
#include "avglab/format.hpp"
#include "avglab/function_spec.hpp"
#include "json.hpp"

namespace avglab {

using json = nlohmann::ordered_json;

const std::vector<ExperimentInfo>& experiment_registry() {
  static const std::vector<ExperimentInfo> registry{
      {"weyl-ud", "Fact power-dist", "uniform distribution of <alpha^n x>: star discrepancy and Weyl sums"},
      {"discrepancy-bound", "Fact discrep", "discrepancy decay against (log N)^(3/2+eps)/sqrt(N)"},
      {"periodic-average", "Fact per-sample", "Birkhoff averages of periodic functions tend to the mean"},
      {"sobol-singular", "Theorem p-Sobol", "singular periodic averages and the discrepancy-variation product"},
      {"bohr-average", "Theorem Bohr", "Bohr almost periodic averages and the truncation sandwich"},
      {"stepanov-average", "Theorem ap-Sobol", "Stepanov functions singular on a uniformly discrete set"},
      {"dio-scan", "Lemma Dio", "non-approximation of a uniformly discrete set by alpha^n x"},
      {"renyi-parry", "Example golden-ratio", "exponential orbits versus the beta-transformation density"},
      {"normality", "Normal numbers", "digit block frequencies of x in base q"},
  };
  return registry;
}

void write_trace_csv(std::ostream& out, std::vector<TraceRow> rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const TraceRow& a, const TraceRow& b) {
    return a.x_index != b.x_index ? a.x_index < b.x_index : a.n < b.n;
  });
  out << kTraceHeader << "\n";
  for (const TraceRow& r : rows) {
    out << r.experiment << "," << r.alpha << "," << r.x_index << "," << r.n << "," << r.stat << ","
        << csv_number(r.re) << "," << csv_number(r.im) << "," << csv_number(r.target_re) << ","
        << csv_number(r.target_im) << "," << csv_number(r.abs_err) << "\n";
  }
}

namespace {

struct Criteria {
  std::map<std::string, double> values;
  double operator[](const std::string& key) const { return values.at(key); }
};

std::map<std::string, double> default_criteria(const std::string& id) {
  if (id == "weyl-ud") return {{"max_median_star", 0.02}, {"max_weyl", 0.05}, {"min_fraction", 0.9}, {"epsilon", 0.1}};
  if (id == "discrepancy-bound") return {{"epsilon", 0.1}, {"min_fraction", 0.9}};
  if (id == "periodic-average" || id == "bohr-average" || id == "stepanov-average")
    return {{"tolerance", 0.05}, {"min_fraction", 0.9}};
  if (id == "sobol-singular") return {{"tolerance", 0.05}, {"min_fraction", 0.9}, {"min_decreasing_fraction", 0.9}};
  if (id == "dio-scan") return {{"min_fraction", 0.95}, {"late_fraction", 1.0 / 3.0}};
  if (id == "renyi-parry") return {{"exp_tolerance", 0.02}, {"beta_tolerance", 0.03}, {"min_separation", 0.08}};
  if (id == "normality") return {{"tolerance", 0.02}, {"min_fraction", 0.9}};
  return {};
}

struct Plan {
  std::string id;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::vector<std::string> alpha_text;
  std::vector<Multiplier> alphas;
  mpq_class lo = 1;
  mpq_class hi = 2;
  std::size_t count = 0;
  std::vector<SeedPoint> explicit_x;
  std::size_t n = 0;
  double target_error = 0x1.0p-40;
  std::vector<std::size_t> schedule;
  std::optional<ApFunction> function;
  Criteria criteria;
  long max_k = 5;
  double dio_epsilon = 0.5;
  std::optional<UniformlyDiscreteSet> dio_set;
  unsigned base = 2;
  std::vector<std::size_t> block_lengths{1, 2};
  std::optional<double> sobol_z;
  std::optional<double> sobol_epsilon;
  std::vector<std::size_t> truncations;
  std::size_t bins = 50;
  std::string trace_file;
  std::string summary_file;

  std::size_t samples() const { return explicit_x.size() + count; }
};

mpq_class rational_from(const ConfigValue& v, const std::string& path) {
  const RealConstant c = constant_from_config(v, path);
  if (!c.is_rational()) throw ConfigError(path + ": expected a rational number");
  return c.rational();
}

std::size_t positive_size(ConfigReader& r, const std::string& key) {
  const long long v = r.integer(key);
  if (v < 1) r.fail(key, "must be >= 1");
  return static_cast<std::size_t>(v);
}

std::vector<std::size_t> size_list(ConfigReader& r, const std::string& key) {
  std::vector<std::size_t> out;
  const auto& a = r.array(key);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a[i].is_integer() || a[i].as_integer() < 0)
      r.fail(key + "[" + std::to_string(i) + "]", "expected a non-negative integer");
    out.push_back(static_cast<std::size_t>(a[i].as_integer()));
  }
  return out;
}

bool uses_alpha(const std::string& id) { return id != "normality"; }

Plan build_plan(const ConfigValue& doc) {
  ConfigReader root(doc, "");
  Plan p;
  p.id = root.string("experiment");
  const auto& reg = experiment_registry();
  if (std::none_of(reg.begin(), reg.end(), [&](const ExperimentInfo& e) { return e.id == p.id; }))
    root.fail("experiment", "unknown experiment '" + p.id + "'");
  const long long seed = root.integer_or("seed", 0);
  if (seed < 0) root.fail("seed", "must be non-negative");
  p.seed = static_cast<std::uint64_t>(seed);
  const long long threads = root.integer_or("threads", 1);
  if (threads < 1) root.fail("threads", "must be >= 1");
  p.threads = static_cast<unsigned>(threads);

  if (uses_alpha(p.id) || root.has("orbit")) {
    ConfigReader orbit = root.table("orbit");
    if (uses_alpha(p.id)) {
      const ConfigValue& a = orbit.raw("alpha");
      std::vector<ConfigValue> list = a.is_array() ? a.as_array() : std::vector<ConfigValue>{a};
      if (list.empty()) orbit.fail("alpha", "needs at least one multiplier");
      for (std::size_t i = 0; i < list.size(); ++i) {
        const std::string path = "orbit.alpha" + (a.is_array() ? "[" + std::to_string(i) + "]" : std::string());
        try {
          p.alphas.emplace_back(constant_from_config(list[i], path));
        } catch (const ConfigError&) {
          throw;
        } catch (const InvalidArgument& e) {
          throw ConfigError(path + ": " + e.what());
        }
        p.alpha_text.push_back(p.alphas.back().to_string());
      }
    }
    p.n = positive_size(orbit, "n");
    p.target_error = orbit.number_or("target_error", 0x1.0p-40);
    if (!(p.target_error >= 0x1.0p-52 && p.target_error <= 0x1.0p-20))
      orbit.fail("target_error", "must lie in [2^-52, 2^-20]");
    if (orbit.has("schedule")) {
      p.schedule = size_list(orbit, "schedule");
      for (std::size_t i = 0; i < p.schedule.size(); ++i)
        if (p.schedule[i] == 0 || (i > 0 && p.schedule[i] <= p.schedule[i - 1]))
          orbit.fail("schedule", "must be strictly increasing and positive");
      if (p.schedule.empty() || p.schedule.back() != p.n) orbit.fail("schedule", "must end at n");
    }
    orbit.finish();
  }

  ConfigReader sampling = root.table("sampling");
  if (const ConfigValue* v = sampling.optional_raw("lo")) p.lo = rational_from(*v, "sampling.lo");
  if (const ConfigValue* v = sampling.optional_raw("hi")) p.hi = rational_from(*v, "sampling.hi");
  if (!(p.lo < p.hi)) sampling.fail("hi", "must exceed lo");
  p.count = static_cast<std::size_t>(sampling.integer_or("count", 0));
  if (sampling.has("explicit")) {
    const auto& e = sampling.array("explicit");
    for (std::size_t i = 0; i < e.size(); ++i)
      p.explicit_x.push_back(SeedPoint::exact(rational_from(e[i], "sampling.explicit[" + std::to_string(i) + "]")));
  }
  if (p.samples() == 0) sampling.fail("count", "no x samples requested");
  sampling.finish();

  const bool needs_function = p.id == "periodic-average" || p.id == "sobol-singular" || p.id == "bohr-average" ||
                              p.id == "stepanov-average" || p.id == "renyi-parry";
  if (needs_function) {
    if (p.id == "renyi-parry" && !root.has("function")) {
      root.optional_raw("function");
      p.function = PeriodicFunction::indicator(0.0, (std::sqrt(5.0) - 1.0) / 2.0);
    } else {
      p.function = function_from_config(root.raw("function"), "function");
    }
  }
  if (p.id == "sobol-singular" && !std::holds_alternative<SingularPeriodic>(*p.function))
    throw ConfigError("function.type: sobol-singular needs a singular periodic function");
  if (p.id == "bohr-average" && !std::holds_alternative<BohrSeries>(*p.function))
    throw ConfigError("function.type: bohr-average needs a Bohr series");
  if (p.id == "stepanov-average" && !std::holds_alternative<StepanovFunction>(*p.function))
    throw ConfigError("function.type: stepanov-average needs a Stepanov function");

  p.criteria.values = default_criteria(p.id);
  if (root.has("criteria")) {
    ConfigReader c = root.table("criteria");
    for (auto& [k, v] : p.criteria.values) v = c.number_or(k, v);
    c.finish();
  }

  if (p.id == "weyl-ud" && root.has("weyl")) {
    ConfigReader w = root.table("weyl");
    p.max_k = static_cast<long>(w.integer_or("max_k", 5));
    if (p.max_k < 1) w.fail("max_k", "must be >= 1");
    w.finish();
  }
  if (p.id == "dio-scan") {
    p.dio_set = UniformlyDiscreteSet::integers();
    if (root.has("dio")) {
      ConfigReader d = root.table("dio");
      p.dio_epsilon = d.number_or("epsilon", 0.5);
      if (!(p.dio_epsilon > 0.0)) d.fail("epsilon", "must be positive");
      if (const ConfigValue* s = d.optional_raw("set")) p.dio_set = set_from_config(*s, "dio.set");
      d.finish();
    }
  }
  if (p.id == "normality") {
    ConfigReader nm = root.table("normality");
    const long long base = nm.integer_or("base", 2);
    if (base < 2 || base > 36) nm.fail("base", "must lie in 2..36");
    p.base = static_cast<unsigned>(base);
    if (nm.has("block_lengths")) p.block_lengths = size_list(nm, "block_lengths");
    for (std::size_t l : p.block_lengths)
      if (l == 0) nm.fail("block_lengths", "block lengths must be >= 1");
    p.n = positive_size(nm, "digits");
    nm.finish();
  }
  if (p.id == "sobol-singular" && root.has("sobol")) {
    ConfigReader s = root.table("sobol");
    if (s.has("z")) p.sobol_z = s.number("z");
    if (s.has("epsilon")) p.sobol_epsilon = s.number("epsilon");
    s.finish();
  }
  if (p.id == "bohr-average") {
    const auto& series = std::get<BohrSeries>(*p.function);
    if (root.has("bohr")) {
      ConfigReader b = root.table("bohr");
      if (b.has("truncations")) p.truncations = size_list(b, "truncations");
      b.finish();
    }
    if (p.truncations.empty())
      for (std::size_t m = 0; m < series.size(); m = m == 0 ? 1 : 2 * m) p.truncations.push_back(m);
    for (std::size_t m : p.truncations)
      if (m > series.size()) throw ConfigError("bohr.truncations: order exceeds the number of stored terms");
  }
  if (p.id == "renyi-parry") {
    if (root.has("renyi")) {
      ConfigReader rp = root.table("renyi");
      const long long bins = rp.integer_or("bins", 50);
      if (bins < 1) rp.fail("bins", "must be >= 1");
      p.bins = static_cast<std::size_t>(bins);
      rp.finish();
    }
    for (const Multiplier& a : p.alphas)
      if (!RenyiParryDensity::for_multiplier(a))
        throw ConfigError("orbit.alpha: no built-in Renyi-Parry density for alpha = " + a.to_string());
  }

  p.trace_file = p.id + ".trace.csv";
  p.summary_file = p.id + ".summary.json";
  if (root.has("output")) {
    ConfigReader o = root.table("output");
    p.trace_file = o.string_or("trace", p.trace_file);
    p.summary_file = o.string_or("summary", p.summary_file);
    o.finish();
  }
  if (p.schedule.empty()) {
    for (std::size_t m = 100; m < p.n; m *= 10) p.schedule.push_back(m);
    p.schedule.push_back(p.n);
  }
  root.finish();
  return p;
}

// ---------------------------------------------------------------------------

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body) {
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned k = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (k == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < k; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::uint64_t seed_bits(const Plan& p) {
  long long bits = 64;
  const double abs_hi = std::max(std::fabs(p.hi.get_d()), std::fabs(p.lo.get_d()));
  for (const Multiplier& a : p.alphas)
    bits = std::max(bits, orbit_working_precision(a.abs_value_log2(), abs_hi, p.n, p.target_error));
  return static_cast<std::uint64_t>(bits);
}

SeedPoint seed_point(const Plan& p, std::size_t index, std::uint64_t bits) {
  if (index < p.explicit_x.size()) return p.explicit_x[index];
  return SeedPoint::sampled(p.seed, index, p.lo, p.hi, bits);
}

double fraction(const std::vector<bool>& flags) {
  if (flags.empty()) return 0.0;
  return static_cast<double>(std::count(flags.begin(), flags.end(), true)) / static_cast<double>(flags.size());
}

json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

json stats_json(const SampleStats& s) { return {{"median", s.median}, {"q25", s.q25}, {"q75", s.q75}, {"iqr", s.iqr()}}; }

double envelope(std::size_t n, double eps) {
  const double ln = std::log(static_cast<double>(n));
  return std::pow(ln, 1.5 + eps) / std::sqrt(static_cast<double>(n));
}

TraceRow row(const Plan& p, std::size_t a, std::size_t x, std::size_t n, std::string stat, cplx value, cplx target,
             std::optional<double> err = {}) {
  return {p.id,     a < p.alpha_text.size() ? p.alpha_text[a] : std::string(),
          x,        n,
          std::move(stat), value.real(), value.imag(), target.real(), target.imag(),
          err ? *err : std::abs(value - target)};
}

struct Output {
  std::vector<TraceRow> rows;
  json summary = json::object();
  bool pass = true;
};

// Per-sample results are stored by index and merged in index order.
template <class R>
std::vector<R> map_samples(const Plan& p, const std::function<R(std::size_t)>& f) {
  std::vector<R> out(p.samples());
  parallel_for(p.samples(), p.threads, [&](std::size_t i) { out[i] = f(i); });
  return out;
}

// --- weyl-ud and discrepancy-bound -----------------------------------------

void run_discrepancy(const Plan& p, Output& out, bool weyl) {
  const std::uint64_t bits = seed_bits(p);
  const double eps = p.criteria["epsilon"];
  json per_alpha = json::array();
  for (std::size_t a = 0; a < p.alphas.size(); ++a) {
    struct Sample {
      std::vector<DiscrepancyCheckpoint> trace;
      std::vector<cplx> w;
      UdBoundFit fit;
    };
    auto results = map_samples<Sample>(p, [&](std::size_t i) {
      const FractionalOrbit orbit = generate_orbit(p.alphas[a], seed_point(p, i, bits), p.n, p.target_error);
      Sample s;
      for (std::size_t n : p.schedule) {
        const auto d = discrepancies(orbit.prefix(n));
        s.trace.push_back({n, d.star, d.extreme});
      }
      if (weyl)
        for (long k = 1; k <= p.max_k; ++k) s.w.push_back(weyl_sum(orbit, k));
      s.fit = ud_bound_check(s.trace, eps);
      return s;
    });
    std::vector<double> star, chat;
    std::vector<bool> weyl_ok, fit_ok, under;
    for (std::size_t i = 0; i < results.size(); ++i) {
      const Sample& s = results[i];
      bool all_under = true;
      for (const auto& c : s.trace) {
        const double env = envelope(c.n, eps);
        out.rows.push_back(row(p, a, i, c.n, "star_discrepancy", c.star, weyl ? 0.0 : env, c.star));
        out.rows.push_back(row(p, a, i, c.n, "extreme_discrepancy", c.extreme, weyl ? 0.0 : env, c.extreme));
        all_under = all_under && c.star <= env;
      }
      double wmax = 0.0;
      for (std::size_t k = 0; k < s.w.size(); ++k) {
        out.rows.push_back(row(p, a, i, p.n, "weyl_" + std::to_string(k + 1), s.w[k], 0.0));
        wmax = std::max(wmax, std::abs(s.w[k]));
      }
      star.push_back(s.trace.back().star);
      chat.push_back(s.fit.c_hat);
      if (weyl) weyl_ok.push_back(wmax <= p.criteria["max_weyl"]);
      fit_ok.push_back(s.fit.pass);
      under.push_back(all_under);
    }
    const SampleStats st = sample_stats(star);
    json j = {{"alpha", p.alpha_text[a]},
              {"star_discrepancy", stats_json(st)},
              {"c_hat", stats_json(sample_stats(chat))},
              {"envelope", envelope(p.n, eps)},
              {"fraction_under_envelope", fraction(under)}};
    bool pass;
    if (weyl) {
      j["fraction_weyl_within"] = fraction(weyl_ok);
      pass = st.median <= p.criteria["max_median_star"] && fraction(weyl_ok) >= p.criteria["min_fraction"];
    } else {
      j["fraction_fit_pass"] = fraction(fit_ok);
      pass = fraction(fit_ok) >= p.criteria["min_fraction"];
    }
    j["pass"] = pass;
    out.pass = out.pass && pass;
    per_alpha.push_back(j);
  }
  out.summary["results"] = per_alpha;
}

// --- averages of periodic, singular, Stepanov functions ---------------------

void run_average(const Plan& p, Output& out) {
  const std::uint64_t bits = seed_bits(p);
  const ApFunction& f = *p.function;
  cplx target;
  double target_error = 0.0;
  if (const auto* st = std::get_if<StepanovFunction>(&f)) {
    target = st->density_mean();
  } else {
    const MeanEstimate m = mean(f);
    target = m.value;
    target_error = m.error;
  }
  const auto period = period_of(f);
  const bool periodic = period && std::fabs(1.0 / *period - std::round(1.0 / *period)) < 1e-12;
  const bool sobol = p.id == "sobol-singular";
  std::optional<double> z = p.sobol_z;
  if (sobol && !z) z = std::get<SingularPeriodic>(f).singularities().front().z;
  out.summary["function"] = json::parse(describe(f));
  out.summary["target"] = complex_json(target);
  out.summary["target_error"] = target_error;
  json per_alpha = json::array();
  for (std::size_t a = 0; a < p.alphas.size(); ++a) {
    struct Sample {
      AverageTrace trace;
      std::optional<SobolReport> sobol;
    };
    auto results = map_samples<Sample>(p, [&](std::size_t i) {
      OrbitOptions opt;
      opt.retain_unreduced = !periodic;
      const FractionalOrbit orbit = generate_orbit(p.alphas[a], seed_point(p, i, bits), p.n, p.target_error, opt);
      Sample s{convergence_trace(f, orbit, p.schedule, target), std::nullopt};
      if (sobol) s.sobol = sobol_criterion(std::get<SingularPeriodic>(f), orbit, *z, p.sobol_epsilon, p.schedule);
      return s;
    });
    std::vector<double> errs;
    std::vector<bool> ok, decreasing;
    for (std::size_t i = 0; i < results.size(); ++i) {
      const Sample& s = results[i];
      for (std::size_t c = 0; c < s.trace.checkpoints.size(); ++c) {
        const auto& cp = s.trace.checkpoints[c];
        out.rows.push_back(row(p, a, i, cp.n, "S_N", cp.value, target, cp.abs_error));
        if (s.sobol) {
          const SobolRow& sr = s.sobol->rows[c];
          out.rows.push_back(row(p, a, i, sr.n, "D_N", sr.discrepancy, 0.0));
          out.rows.push_back(row(p, a, i, sr.n, "V_N", sr.variation, 0.0));
          out.rows.push_back(row(p, a, i, sr.n, "product", sr.product, 0.0));
        }
      }
      errs.push_back(s.trace.checkpoints.back().abs_error);
      ok.push_back(errs.back() <= p.criteria["tolerance"]);
      if (s.sobol) decreasing.push_back(s.sobol->decreasing);
    }
    json j = {{"alpha", p.alpha_text[a]}, {"abs_error", stats_json(sample_stats(errs))}, {"fraction_within", fraction(ok)}};
    bool pass = fraction(ok) >= p.criteria["min_fraction"];
    if (sobol) {
      j["eta"] = results.front().sobol->eta;
      j["epsilon"] = results.front().sobol->epsilon;
      j["fraction_decreasing"] = fraction(decreasing);
      pass = pass && fraction(decreasing) >= p.criteria["min_decreasing_fraction"];
    }
    j["pass"] = pass;
    out.pass = out.pass && pass;
    per_alpha.push_back(j);
  }
  out.summary["results"] = per_alpha;
}

// --- bohr-average -----------------------------------------------------------

void run_bohr(const Plan& p, Output& out) {
  const std::uint64_t bits = seed_bits(p);
  const BohrSeries& series = std::get<BohrSeries>(*p.function);
  const std::size_t terms = series.size();
  out.summary["function"] = json::parse(describe(*p.function));
  out.summary["target"] = complex_json(series.a0());
  json tails = json::array();
  for (std::size_t m : p.truncations) tails.push_back({{"m", m}, {"tail", series.tail(m)}});
  out.summary["truncations"] = tails;
  json per_alpha = json::array();
  for (std::size_t a = 0; a < p.alphas.size(); ++a) {
    struct Sample {
      // sums[c][m]: S_N(g_m) at checkpoint c; m = terms is the stored series.
      std::vector<std::vector<cplx>> sums;
    };
    auto results = map_samples<Sample>(p, [&](std::size_t i) {
      OrbitOptions opt;
      opt.retain_unreduced = true;
      const FractionalOrbit orbit = generate_orbit(p.alphas[a], seed_point(p, i, bits), p.n, p.target_error, opt);
      const auto prec = static_cast<mpfr_bits>(orbit.working_precision() + 64);
      std::vector<BigFloat> k;
      for (const TrigTerm& t : series.terms()) k.push_back(t.k.to_bigfloat(prec));
      // Partial sums over the terms share one evaluation of each character.
      std::vector<double> re(terms + 1, 0.0), rc(terms + 1, 0.0), im(terms + 1, 0.0), ic(terms + 1, 0.0);
      auto add = [](double& s, double& c, double v) {
        const double t = s + v;
        c += std::fabs(s) >= std::fabs(v) ? (s - t) + v : (v - t) + s;
        s = t;
      };
      Sample s;
      std::size_t c = 0;
      for (std::size_t n = 0; n < p.n; ++n) {
        const BigFloat& x = orbit.unreduced(n);
        cplx g = series.a0();
        add(re[0], rc[0], g.real());
        add(im[0], ic[0], g.imag());
        for (std::size_t l = 0; l < terms; ++l) {
          BigFloat kx = k[l] * x;
          const double r = kx.frac().to_double();
          g += series.terms()[l].a * cplx(std::cos(2 * std::numbers::pi * r), std::sin(2 * std::numbers::pi * r));
          add(re[l + 1], rc[l + 1], g.real());
          add(im[l + 1], ic[l + 1], g.imag());
        }
        if (n + 1 == p.schedule[c]) {
          std::vector<cplx> v(terms + 1);
          for (std::size_t m = 0; m <= terms; ++m)
            v[m] = cplx((re[m] + rc[m]) / double(n + 1), (im[m] + ic[m]) / double(n + 1));
          s.sums.push_back(std::move(v));
          ++c;
        }
      }
      return s;
    });
    std::vector<bool> ok;
    std::vector<double> errs;
    bool sandwich = true;
    for (std::size_t i = 0; i < results.size(); ++i) {
      for (std::size_t c = 0; c < p.schedule.size(); ++c) {
        const std::size_t n = p.schedule[c];
        const cplx sf = results[i].sums[c][terms];
        out.rows.push_back(row(p, a, i, n, "S_N", sf, series.a0()));
        for (std::size_t m : p.truncations) {
          const cplx sg = results[i].sums[c][m];
          const double d = std::abs(sf - sg);
          sandwich = sandwich && d <= series.tail(m);
          out.rows.push_back(row(p, a, i, n, "S_N_m" + std::to_string(m), sg, sf, d));
        }
      }
      errs.push_back(std::abs(results[i].sums.back()[terms] - series.a0()));
      ok.push_back(errs.back() <= p.criteria["tolerance"]);
    }
    const bool pass = sandwich && fraction(ok) >= p.criteria["min_fraction"];
    per_alpha.push_back({{"alpha", p.alpha_text[a]},
                         {"abs_error", stats_json(sample_stats(errs))},
                         {"fraction_within", fraction(ok)},
                         {"sandwich_holds", sandwich},
                         {"pass", pass}});
    out.pass = out.pass && pass;
  }
  out.summary["results"] = per_alpha;
}

// --- dio-scan ---------------------------------------------------------------

void run_dio(const Plan& p, Output& out) {
  const std::uint64_t bits = seed_bits(p);
  const UniformlyDiscreteSet& y = *p.dio_set;
  const double late = p.criteria["late_fraction"];
  out.summary["set"] = y.describe();
  out.summary["epsilon"] = p.dio_epsilon;
  json per_alpha = json::array();
  for (std::size_t a = 0; a < p.alphas.size(); ++a) {
    auto results = map_samples<DioScanReport>(
        p, [&](std::size_t i) { return dio_scan(p.alphas[a], seed_point(p, i, bits), y, p.dio_epsilon, p.n); });
    std::vector<bool> finite, early;
    std::vector<double> counts;
    json samples = json::array();
    for (std::size_t i = 0; i < results.size(); ++i) {
      const DioScanReport& r = results[i];
      for (std::size_t n : r.violations) {
        const double thr = std::pow(static_cast<double>(n), -(1.0 + p.dio_epsilon));
        const bool hit = std::find(r.hits.begin(), r.hits.end(), n) != r.hits.end();
        out.rows.push_back(row(p, a, i, n, hit ? "hit" : "violation", 1.0, thr, 0.0));
      }
      const bool is_finite = r.verdict == DioVerdict::finite_violations;
      const bool all_early = std::all_of(r.violations.begin(), r.violations.end(),
                                         [&](std::size_t n) { return static_cast<double>(n) <= late * p.n; });
      finite.push_back(is_finite);
      early.push_back(is_finite && all_early);
      counts.push_back(static_cast<double>(r.violations.size()));
      samples.push_back({{"x_index", i}, {"verdict", to_string(r.verdict)}, {"violations", r.violations}, {"hits", r.hits}});
    }
    const bool pass = fraction(early) >= p.criteria["min_fraction"];
    per_alpha.push_back({{"alpha", p.alpha_text[a]},
                         {"budget", results.front().budget},
                         {"fraction_finite", fraction(finite)},
                         {"fraction_finite_and_early", fraction(early)},
                         {"violation_count", stats_json(sample_stats(counts))},
                         {"samples", samples},
                         {"pass", pass}});
    out.pass = out.pass && pass;
  }
  out.summary["results"] = per_alpha;
}

// --- renyi-parry -------------------------------------------------------------

void run_renyi(const Plan& p, Output& out) {
  const std::uint64_t bits = seed_bits(p);
  const ApFunction& f = *p.function;
  out.summary["function"] = json::parse(describe(f));
  json per_alpha = json::array();
  for (std::size_t a = 0; a < p.alphas.size(); ++a) {
    const RenyiParryDensity h = *RenyiParryDensity::for_multiplier(p.alphas[a]);
    const cplx leb = mean(f).value;
    const cplx dens = h.integrate(f);
    struct Sample {
      AverageTrace exp;
      AverageTrace beta;
      std::vector<std::size_t> exp_hist;
      std::vector<std::size_t> beta_hist;
    };
    auto histogram = [&](const FractionalOrbit& o) {
      std::vector<std::size_t> c(p.bins, 0);
      for (double v : o.entries()) c[std::min(p.bins - 1, static_cast<std::size_t>(v * static_cast<double>(p.bins)))]++;
      return c;
    };
    auto results = map_samples<Sample>(p, [&](std::size_t i) {
      const SeedPoint x = seed_point(p, i, bits);
      const FractionalOrbit e = generate_orbit(p.alphas[a], x, p.n, p.target_error);
      mpq_class fx = x.value();
      mpz_class fl;
      mpz_fdiv_q(fl.get_mpz_t(), fx.get_num_mpz_t(), fx.get_den_mpz_t());
      fx -= fl;
      const FractionalOrbit b = beta_orbit(p.alphas[a], SeedPoint::exact(fx), p.n, BetaMode::certified, p.target_error);
      return Sample{convergence_trace(f, e, p.schedule, leb), convergence_trace(f, b, p.schedule, dens), histogram(e),
                    histogram(b)};
    });
    std::vector<double> ev, bv;
    std::vector<std::size_t> eh(p.bins, 0), bh(p.bins, 0);
    for (std::size_t i = 0; i < results.size(); ++i) {
      const Sample& s = results[i];
      for (std::size_t c = 0; c < p.schedule.size(); ++c) {
        const auto& ce = s.exp.checkpoints[c];
        const auto& cb = s.beta.checkpoints[c];
        out.rows.push_back(row(p, a, i, ce.n, "S_N_exp", ce.value, leb, ce.abs_error));
        out.rows.push_back(row(p, a, i, cb.n, "S_N_beta", cb.value, dens, cb.abs_error));
      }
      ev.push_back(s.exp.checkpoints.back().value.real());
      bv.push_back(s.beta.checkpoints.back().value.real());
      for (std::size_t k = 0; k < p.bins; ++k) {
        eh[k] += s.exp_hist[k];
        bh[k] += s.beta_hist[k];
      }
    }
    const SampleStats es = sample_stats(ev);
    const SampleStats bs = sample_stats(bv);
    const double sep = std::fabs(es.median - bs.median);
    const bool pass = std::fabs(es.median - leb.real()) <= p.criteria["exp_tolerance"] &&
                      std::fabs(bs.median - dens.real()) <= p.criteria["beta_tolerance"] &&
                      sep >= p.criteria["min_separation"];
    per_alpha.push_back({{"alpha", p.alpha_text[a]},
                         {"lebesgue_mean", leb.real()},
                         {"lebesgue_mean_complex", complex_json(leb)},
                         {"density_integral", dens.real()},
                         {"density_integral_complex", complex_json(dens)},
                         {"exp_orbit_avg", stats_json(es)},
                         {"T_orbit_avg", stats_json(bs)},
                         {"separation", sep},
                         {"density", {{"breaks", h.breaks()}, {"values", h.values()}}},
                         {"histogram", {{"bins", p.bins}, {"exp_counts", eh}, {"beta_counts", bh}}},
                         {"pass", pass}});
    out.pass = out.pass && pass;
  }
  out.summary["results"] = per_alpha;
}

// --- normality ----------------------------------------------------------------

// Frequencies of length-l blocks in the purely periodic part of the base-q
// expansion of a rational in [0,1), read cyclically.
std::vector<double> periodic_frequencies(const mpq_class& x, unsigned q, std::size_t l, std::size_t& cycle) {
  mpq_class r = x;
  mpz_class fl;
  mpz_fdiv_q(fl.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
  r -= fl;
  const mpz_class den = r.get_den();
  mpz_class num = r.get_num();
  std::map<mpz_class, std::size_t> seen;
  std::vector<unsigned> digits;
  constexpr std::size_t kMaxCycle = 1u << 20;
  while (!seen.count(num)) {
    if (digits.size() > kMaxCycle) throw InvalidArgument("expansion period too long for an exact comparison");
    seen[num] = digits.size();
    num *= q;
    mpz_class d;
    mpz_fdiv_qr(d.get_mpz_t(), num.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    digits.push_back(static_cast<unsigned>(d.get_ui()));
  }
  const std::size_t start = seen[num];
  const std::vector<unsigned> period(digits.begin() + static_cast<long>(start), digits.end());
  cycle = digits.size();
  std::size_t blocks = 1;
  for (std::size_t i = 0; i < l; ++i) blocks *= q;
  std::vector<double> freq(blocks, 0.0);
  for (std::size_t j = 0; j < period.size(); ++j) {
    std::size_t b = 0;
    for (std::size_t i = 0; i < l; ++i) b = b * q + period[(j + i) % period.size()];
    freq[b] += 1.0 / static_cast<double>(period.size());
  }
  return freq;
}

void run_normality(const Plan& p, Output& out) {
  const auto bits = static_cast<std::uint64_t>(std::ceil(static_cast<double>(p.n) * std::log2(p.base))) + 64;
  struct Sample {
    std::vector<BlockFrequencies> blocks;
  };
  auto results = map_samples<Sample>(p, [&](std::size_t i) {
    Sample s;
    const SeedPoint x = seed_point(p, i, bits);
    for (std::size_t l : p.block_lengths) s.blocks.push_back(digit_block_frequencies(x, p.base, l, p.n));
    return s;
  });
  std::vector<bool> ok;
  bool explicit_ok = true;
  json explicit_json = json::array();
  for (std::size_t i = 0; i < results.size(); ++i) {
    const bool is_explicit = i < p.explicit_x.size();
    bool sample_ok = true;
    json per_length = json::array();
    for (std::size_t li = 0; li < p.block_lengths.size(); ++li) {
      const BlockFrequencies& bf = results[i].blocks[li];
      const std::size_t l = p.block_lengths[li];
      std::vector<double> expected(bf.frequency.size(), std::pow(static_cast<double>(p.base), -static_cast<double>(l)));
      double tol = p.criteria["tolerance"];
      if (is_explicit) {
        std::size_t cycle = 0;
        expected = periodic_frequencies(p.explicit_x[i].value(), p.base, l, cycle);
        // Windows that straddle the pre-period or a partial final period.
        tol = static_cast<double>(2 * cycle + l) / static_cast<double>(p.n - l + 1);
      }
      json absent = json::array();
      for (std::size_t b = 0; b < bf.frequency.size(); ++b) {
        const double got = bf.frequency[b];
        out.rows.push_back(row(p, 0, i, p.n, "block_" + bf.label(b), got, expected[b]));
        if (is_explicit && expected[b] == 0.0) {
          sample_ok = sample_ok && got == 0.0;
          absent.push_back(bf.label(b));
        } else {
          sample_ok = sample_ok && std::fabs(got - expected[b]) <= tol;
        }
      }
      if (is_explicit) per_length.push_back({{"block_length", l}, {"absent_blocks", absent}, {"tolerance", tol}});
    }
    if (is_explicit) {
      explicit_ok = explicit_ok && sample_ok;
      explicit_json.push_back(
          {{"x", p.explicit_x[i].to_string()}, {"matches_periodic_expansion", sample_ok}, {"block_lengths", per_length}});
    } else {
      ok.push_back(sample_ok);
    }
  }
  const bool pass = explicit_ok && (ok.empty() || fraction(ok) >= p.criteria["min_fraction"]);
  out.summary["base"] = p.base;
  out.summary["digits"] = p.n;
  out.summary["block_lengths"] = p.block_lengths;
  out.summary["explicit"] = explicit_json;
  out.summary["sampled_count"] = ok.size();
  out.summary["fraction_within"] = ok.empty() ? json(nullptr) : json(fraction(ok));
  out.summary["pass"] = pass;
  out.pass = pass;
}

}  // namespace

// ---------------------------------------------------------------------------

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
  ExperimentConfig c;
  c.document_ = ConfigValue::parse(text);
  const Plan p = build_plan(c.document_);
  c.experiment_ = p.id;
  c.seed_ = p.seed;
  c.threads_ = p.threads;
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

ExperimentResult run_experiment(const ExperimentConfig& config, std::optional<std::uint64_t> seed,
                                 std::optional<unsigned> threads) {
  Plan p = build_plan(config.document());
  if (seed) p.seed = *seed;
  if (threads) p.threads = std::max(1u, *threads);
  Output out;
  const auto& reg = experiment_registry();
  const auto info = std::find_if(reg.begin(), reg.end(), [&](const ExperimentInfo& e) { return e.id == p.id; });
  out.summary["experiment"] = p.id;
  out.summary["statement"] = info->statement;
  out.summary["seed"] = p.seed;
  out.summary["N"] = p.n;
  out.summary["samples"] = p.samples();
  out.summary["schedule"] = p.schedule;
  out.summary["criteria"] = p.criteria.values;
  if (p.id == "weyl-ud") run_discrepancy(p, out, true);
  else if (p.id == "discrepancy-bound") run_discrepancy(p, out, false);
  else if (p.id == "periodic-average" || p.id == "sobol-singular" || p.id == "stepanov-average") run_average(p, out);
  else if (p.id == "bohr-average") run_bohr(p, out);
  else if (p.id == "dio-scan") run_dio(p, out);
  else if (p.id == "renyi-parry") run_renyi(p, out);
  else run_normality(p, out);
  out.summary["pass"] = out.pass;
  out.summary["config"] = config.document().serialize();
  ExperimentResult r;
  r.experiment = p.id;
  r.pass = out.pass;
  r.trace = std::move(out.rows);
  r.summary_json = out.summary.dump(2) + "\n";
  r.trace_file = p.trace_file;
  r.summary_file = p.summary_file;
  return r;
}

void write_outputs(const ExperimentResult& result, const std::string& directory) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(directory, ec);
  if (ec) throw Error("cannot create output directory " + directory + ": " + ec.message());
  const fs::path dir(directory);
  std::ofstream trace(dir / result.trace_file, std::ios::binary);
  if (!trace) throw Error("cannot write " + (dir / result.trace_file).string());
  write_trace_csv(trace, result.trace);
  std::ofstream summary(dir / result.summary_file, std::ios::binary);
  if (!summary) throw Error("cannot write " + (dir / result.summary_file).string());
  summary << result.summary_json;
}

}  // namespace avglab
