// avglab command line: run experiment configs, list experiments, dump orbits.
#include <cstdio>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "avglab/experiment.hpp"
#include "avglab/orbit.hpp"
#include "avglab/seed_point.hpp"

namespace {

constexpr int kPass = 0;
constexpr int kError = 1;
constexpr int kPredicateFailed = 2;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"avglab: averages along exponential orbits"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  auto* run = app.add_subcommand("run", "run an experiment config");
  run->add_option("--config", config_path, "TOML experiment config")->required();
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--seed", seed, "override the config seed");
  run->add_option("--threads", threads, "worker threads (results do not depend on it)")->check(CLI::PositiveNumber);

  auto* list = app.add_subcommand("list", "list experiment ids");

  std::string alpha_text;
  std::string x_text;
  std::size_t n = 0;
  double target = 0x1.0p-40;
  auto* orbit = app.add_subcommand("orbit", "print <alpha^n x> as CSV");
  orbit->add_option("--alpha", alpha_text, "multiplier")->required();
  orbit->add_option("--x", x_text, "rational seed point")->required();
  orbit->add_option("--n", n, "orbit length")->required()->check(CLI::PositiveNumber);
  orbit->add_option("--target-error", target, "entry accuracy");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*list) {
      std::cout << "id,statement,summary\n";
      for (const auto& e : avglab::experiment_registry())
        std::cout << e.id << "," << e.statement << "," << e.summary << "\n";
      return kPass;
    }
    if (*orbit) {
      const auto alpha = avglab::Multiplier::parse(alpha_text);
      const auto o = avglab::generate_orbit(alpha, avglab::SeedPoint::parse(x_text), n, target);
      avglab::write_orbit_csv(std::cout, o);
      return kPass;
    }
    const auto config = avglab::ExperimentConfig::load(config_path);
    const auto result = avglab::run_experiment(config, seed, threads);
    avglab::write_outputs(result, out_dir);
    std::cout << result.experiment << ": " << (result.pass ? "PASS" : "FAIL") << " (" << out_dir << "/"
              << result.summary_file << ")\n";
    return result.pass ? kPass : kPredicateFailed;
  } catch (const std::exception& e) {
    std::cerr << "avglab: error: " << e.what() << "\n";
    return kError;
  }
}
