#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "avglab/config.hpp"
#include "avglab/function_spec.hpp"
#include "doctest.h"

using namespace avglab;

namespace {

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ConfigValue random_value(std::mt19937_64& rng, int depth);

ConfigValue random_scalar(std::mt19937_64& rng) {
  switch (rng() % 4) {
    case 0: return ConfigValue(static_cast<bool>(rng() % 2));
    case 1: return ConfigValue(static_cast<long long>(rng() % 2000001) - 1000000);
    case 2: return ConfigValue(std::ldexp(static_cast<double>(rng() % 1000000) - 5e5, -static_cast<int>(rng() % 30)));
    default: {
      static const char* pieces[] = {"a", "b c", "\"q\"", "back\\slash", "tab\t", "1/3", "# not a comment", "="};
      std::string s;
      for (int i = 0, n = static_cast<int>(rng() % 4); i < n; ++i) s += pieces[rng() % 8];
      return ConfigValue(s);
    }
  }
}

ConfigValue random_table(std::mt19937_64& rng, int depth) {
  ConfigValue t;
  const int n = 1 + static_cast<int>(rng() % 4);
  for (int i = 0; i < n; ++i) t.set("k" + std::to_string(i), random_value(rng, depth + 1));
  return t;
}

ConfigValue random_value(std::mt19937_64& rng, int depth) {
  const auto pick = rng() % 6;
  if (depth < 3 && pick == 4) return random_table(rng, depth);
  if (depth < 3 && pick == 5) {
    ConfigValue::Array a;
    const bool tables = rng() % 3 == 0;
    for (int i = 0, n = static_cast<int>(rng() % 4); i < n; ++i)
      a.push_back(tables ? random_table(rng, depth + 1) : random_scalar(rng));
    return ConfigValue(a);
  }
  return random_scalar(rng);
}

}  // namespace

TEST_CASE("parse scalars tables and arrays") {
  const auto v = ConfigValue::parse(R"(
# comment
experiment = "weyl-ud"   # trailing
seed = 1_000
ratio = 2.5e-1
flag = true
path = 'C:\raw'
list = [1, 2,
        3]   
nested = { a = 1, b = "x" }

[orbit]
alpha = ["2", "3/2"]
sub.key = -inf

[[runs]]
n = 1
[[runs]]
n = 2
)");
  CHECK(v.find("experiment")->as_string() == "weyl-ud");
  CHECK(v.find("seed")->as_integer() == 1000);
  CHECK(v.find("ratio")->as_number() == 0.25);
  CHECK(v.find("flag")->as_bool());
  CHECK(v.find("path")->as_string() == "C:\\raw");
  CHECK(v.find("list")->as_array().size() == 3);
  CHECK(v.find("nested")->find("b")->as_string() == "x");
  CHECK(v.find("orbit")->find("alpha")->as_array()[1].as_string() == "3/2");
  CHECK(std::isinf(v.find("orbit")->find("sub")->find("key")->as_number()));
  REQUIRE(v.find("runs")->as_array().size() == 2);
  CHECK(v.find("runs")->as_array()[1].find("n")->as_integer() == 2);
}

TEST_CASE("parse errors name the line") {
  auto message = [](const std::string& text) {
    try {
      ConfigValue::parse(text);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message("a = 1\na = 2\n").find("line 2") != std::string::npos);
  CHECK(message("[t]\nx=1\n[t]\n").find("line 3") != std::string::npos);
  CHECK(message("x = \"open\n") != "");
  CHECK(message("x = [1, 2\n") != "");
  CHECK(message("= 3\n") != "");
  CHECK(message("x = 1 2\n") != "");
}

TEST_CASE("round trip of the shipped experiment configs") {
  int seen = 0;
  for (const auto& entry : std::filesystem::directory_iterator(AVGLAB_SOURCE_DIR "/exp")) {
    if (entry.path().extension() != ".toml") continue;
    CAPTURE(entry.path().string());
    const ConfigValue v = ConfigValue::parse(read_file(entry.path()));
    const ConfigValue w = ConfigValue::parse(v.serialize());
    CHECK(v == w);
    CHECK(w.serialize() == v.serialize());
    ++seen;
  }
  CHECK(seen == 9);
}

TEST_CASE("round trip of random documents") {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 300; ++i) {
    const ConfigValue v = random_table(rng, 0);
    CAPTURE(v.serialize());
    CHECK(ConfigValue::parse(v.serialize()) == v);
  }
}

TEST_CASE("reader reports paths") {
  const auto v = ConfigValue::parse("[orbit]\nn = -3\nextra = 1\n");
  ConfigReader root(v, "");
  ConfigReader orbit = root.table("orbit");
  CHECK(orbit.integer("n") == -3);
  CHECK_THROWS_WITH_AS(orbit.finish(), doctest::Contains("orbit.extra"), ConfigError);
  CHECK_THROWS_WITH_AS(orbit.string("n"), doctest::Contains("orbit.n"), ConfigError);
  CHECK_THROWS_WITH_AS(orbit.number("missing"), doctest::Contains("orbit.missing"), ConfigError);
}

TEST_CASE("function specs") {
  auto fn = [](const std::string& text) { return function_from_config(ConfigValue::parse(text), "function"); };
  const ApFunction trig = fn("type = \"trigpoly\"\na0 = 2\nterms = [{ k = 1, a = 3 }]\n");
  CHECK(evaluate(trig, 0.0) == cplx(5.0, 0.0));
  CHECK(mean(trig).value == cplx(2.0, 0.0));
  const ApFunction sine = fn("type = \"sine\"\nm = 2\n");
  CHECK(std::abs(evaluate(sine, 0.125) - 1.0) < 1e-15);
  const ApFunction ind = fn("type = \"indicator\"\nlo = 0\nhi = \"1/2\"\n");
  CHECK(evaluate(ind, 0.25) == cplx(1.0, 0.0));
  CHECK(evaluate(ind, 0.75) == cplx(0.0, 0.0));
  const ApFunction fp = fn("type = \"frac_power\"\na = 0.25\n");
  CHECK(std::abs(mean(fp).value.real() - 4.0 / 3.0) < 1e-12);
  const ApFunction bohr = fn("type = \"bohr_geometric\"\ncount = 6\n");
  REQUIRE(std::holds_alternative<BohrSeries>(bohr));
  CHECK(std::get<BohrSeries>(bohr).size() == 6);
  const ApFunction st = fn(
      "type = \"stepanov\"\na = 0.25\nc = 1.0\nset = { type = \"beatty\", theta = \"sqrt(2)\" }\n"
      "smooth = { type = \"cosine\", m = 1 }\n");
  CHECK(std::holds_alternative<StepanovFunction>(st));
  const ApFunction golden = fn("type = \"golden_density\"\n");
  CHECK(std::abs(mean(golden).value.real() - 1.0) < 1e-12);

  CHECK_THROWS_WITH_AS(fn("type = \"wavelet\"\n"), doctest::Contains("function.type"), ConfigError);
  CHECK_THROWS_WITH_AS(fn("type = \"frac_power\"\na = 0.25\nb = 1\n"), doctest::Contains("function.b"), ConfigError);
  CHECK_THROWS_AS(fn("type = \"frac_power\"\na = 1.5\n"), ConfigError);
  CHECK_THROWS_WITH_AS(fn("type = \"bohr_geometric\"\ncount = 0\n"), doctest::Contains("function.count"), ConfigError);
}

TEST_CASE("set specs") {
  auto set = [](const std::string& text) { return set_from_config(ConfigValue::parse(text), "set"); };
  CHECK(set("type = \"integers\"\n").dist(2.25) == doctest::Approx(0.25));
  CHECK(set("type = \"lattice\"\noffset = \"1/2\"\nspacing = 2\n").dist(2.0) == doctest::Approx(0.5));
  CHECK(set("type = \"finite\"\npoints = [1, \"5/2\"]\n").cardinality() == 2);
  CHECK_THROWS_WITH_AS(set("type = \"lattice\"\noffset = 0\nspacing = 0\n"), doctest::Contains("set"), ConfigError);
}
