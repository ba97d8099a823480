#include <filesystem>
#include <fstream>
#include <sstream>

#include "avglab/experiment.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace avglab;

namespace {

std::string csv_of(const ExperimentResult& r) {
  std::ostringstream out;
  write_trace_csv(out, r.trace);
  return out.str();
}

const char* kWeyl = R"(
experiment = "weyl-ud"
seed = 7
[orbit]
alpha = ["2", "tau"]
n = 2000
schedule = [100, 500, 2000]
[sampling]
count = 6
)";

std::string error_of(const std::string& text) {
  try {
    run_experiment(ExperimentConfig::parse(text));
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("registry") {
  const auto& reg = experiment_registry();
  CHECK(reg.size() == 9);
  auto statement = [&](const std::string& id) {
    for (const auto& e : reg)
      if (e.id == id) return e.statement;
    return std::string();
  };
  CHECK(statement("sobol-singular") == "Theorem p-Sobol");
  CHECK(statement("dio-scan") == "Lemma Dio");
  CHECK(reg.front().id == "weyl-ud");
}

TEST_CASE("runs are deterministic and independent of the thread count") {
  const auto config = ExperimentConfig::parse(kWeyl);
  const auto a = run_experiment(config);
  const auto b = run_experiment(config);
  const auto c = run_experiment(config, std::nullopt, 3u);
  CHECK(csv_of(a) == csv_of(b));
  CHECK(a.summary_json == b.summary_json);
  CHECK(csv_of(a) == csv_of(c));
  CHECK(a.summary_json == c.summary_json);
  const auto d = run_experiment(config, std::uint64_t{8});
  CHECK(csv_of(a) != csv_of(d));
}

TEST_CASE("trace layout") {
  const auto r = run_experiment(ExperimentConfig::parse(kWeyl));
  const std::string csv = csv_of(r);
  CHECK(csv.rfind(std::string(kTraceHeader) + "\n", 0) == 0);
  // 2 alphas x 6 samples x (3 checkpoints x 2 discrepancies + 5 Weyl sums)
  CHECK(r.trace.size() == 2 * 6 * 11);
  std::size_t last_x = 0;
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    const auto x = std::stoul(line.substr(line.find(',', line.find(',') + 1) + 1));
    CHECK(x >= last_x);
    last_x = x;
  }
  const auto summary = nlohmann::json::parse(r.summary_json);
  CHECK(summary["experiment"] == "weyl-ud");
  CHECK(summary["results"].size() == 2);
  CHECK(summary["results"][1]["alpha"] == "1/2+1/2*sqrt(5)");
}

TEST_CASE("renyi-parry summary values") {
  const auto r = run_experiment(ExperimentConfig::parse(R"(
experiment = "renyi-parry"
seed = 42
[orbit]
alpha = "tau"
n = 2000
[sampling]
count = 5
)"));
  const auto s = nlohmann::json::parse(r.summary_json)["results"][0];
  CHECK(s["lebesgue_mean"].get<double>() == doctest::Approx(0.6180339887498949).epsilon(1e-12));
  CHECK(s["density_integral"].get<double>() == doctest::Approx(0.7236067977499790).epsilon(1e-12));
  CHECK(s["density"]["values"][0].get<double>() == doctest::Approx(1.1708203932499369).epsilon(1e-12));
  std::size_t total = 0;
  for (const auto& c : s["histogram"]["beta_counts"]) total += c.get<std::size_t>();
  CHECK(total == 5 * 2000);
}

TEST_CASE("normality of an explicit rational") {
  const auto r = run_experiment(ExperimentConfig::parse(R"(
experiment = "normality"
[sampling]
explicit = ["1/3", "2/7"]
[normality]
base = 2
block_lengths = [1, 2, 3]
digits = 3000
)"));
  CHECK(r.pass);
  const auto s = nlohmann::json::parse(r.summary_json);
  CHECK(s["explicit"][0]["block_lengths"][1]["absent_blocks"] == nlohmann::json::array({"00", "11"}));
  CHECK(s["explicit"][1]["block_lengths"][0]["absent_blocks"].empty());
}

TEST_CASE("config errors name the offending key") {
  CHECK(error_of("experiment = \"weyl-ud\"\n[orbit]\nalpha = \"1\"\nn = 10\n[sampling]\ncount = 1\n")
            .find("Multiplier invariant") != std::string::npos);
  CHECK(error_of("experiment = \"weyl-ud\"\n[orbit]\nalpha = \"-1\"\nn = 10\n[sampling]\ncount = 1\n")
            .find("orbit.alpha") != std::string::npos);
  CHECK(error_of("experiment = \"nope\"\n").find("experiment") != std::string::npos);
  CHECK(error_of("experiment = \"weyl-ud\"\n[orbit]\nalpha = \"2\"\nn = 10\nm = 3\n[sampling]\ncount = 1\n")
            .find("orbit.m") != std::string::npos);
  CHECK(error_of("experiment = \"weyl-ud\"\n[orbit]\nalpha = \"2\"\nn = 0\n[sampling]\ncount = 1\n")
            .find("orbit.n") != std::string::npos);
  CHECK(error_of("experiment = \"weyl-ud\"\n[orbit]\nalpha = \"2\"\nn = 100\nschedule = [10, 5, 100]\n"
                 "[sampling]\ncount = 1\n")
            .find("orbit.schedule") != std::string::npos);
  CHECK(error_of("experiment = \"sobol-singular\"\n[orbit]\nalpha = \"2\"\nn = 100\n[sampling]\ncount = 1\n"
                 "[function]\ntype = \"sine\"\n")
            .find("function.type") != std::string::npos);
  CHECK(error_of("experiment = \"renyi-parry\"\n[orbit]\nalpha = \"3\"\nn = 100\n[sampling]\ncount = 1\n")
            .find("orbit.alpha") != std::string::npos);
  CHECK(error_of("experiment = \"weyl-ud\"\n[orbit]\nalpha = \"2\"\nn = 10\n[sampling]\ncount = 1\n[dio]\n")
            .find("dio") != std::string::npos);
}

TEST_CASE("write_outputs") {
  const auto dir = std::filesystem::temp_directory_path() / "avglab_test_outputs" / "nested";
  std::filesystem::remove_all(dir.parent_path());
  auto r = run_experiment(ExperimentConfig::parse(kWeyl));
  write_outputs(r, dir.string());
  std::ifstream trace(dir / "weyl-ud.trace.csv");
  std::stringstream ss;
  ss << trace.rdbuf();
  CHECK(ss.str() == csv_of(r));
  CHECK(std::filesystem::exists(dir / "weyl-ud.summary.json"));
  std::filesystem::remove_all(dir.parent_path());
}
