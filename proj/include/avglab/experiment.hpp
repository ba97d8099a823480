#pragma once

// Configuration-driven experiments: one named experiment per reproduced
// statement, a trace CSV and a summary JSON per run.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "avglab/config.hpp"

namespace avglab {

struct ExperimentInfo {
  std::string id;
  std::string statement;  // e.g. "Theorem p-Sobol"
  std::string summary;
};

// Stable order; nine entries.
const std::vector<ExperimentInfo>& experiment_registry();

struct TraceRow {
  std::string experiment;
  std::string alpha;
  std::size_t x_index = 0;
  std::size_t n = 0;
  std::string stat;
  double re = 0.0;
  double im = 0.0;
  double target_re = 0.0;
  double target_im = 0.0;
  double abs_err = 0.0;
};

inline constexpr const char* kTraceHeader = "experiment,alpha,x_index,N,stat,re,im,target_re,target_im,abs_err";

// Rows sorted by (x_index, N), ties kept in emission order.
void write_trace_csv(std::ostream& out, std::vector<TraceRow> rows);

struct ExperimentResult {
  std::string experiment;
  bool pass = false;
  std::vector<TraceRow> trace;
  std::string summary_json;
  std::string trace_file;    // file names relative to the output directory
  std::string summary_file;
};

// Parsed and schema-checked configuration.
class ExperimentConfig {
 public:
  static ExperimentConfig parse(const std::string& text);
  static ExperimentConfig load(const std::string& path);

  const std::string& experiment() const { return experiment_; }
  std::uint64_t seed() const { return seed_; }
  unsigned threads() const { return threads_; }
  const ConfigValue& document() const { return document_; }

 private:
  ConfigValue document_;
  std::string experiment_;
  std::uint64_t seed_ = 0;
  unsigned threads_ = 1;
};

ExperimentResult run_experiment(const ExperimentConfig& config, std::optional<std::uint64_t> seed = {},
                                 std::optional<unsigned> threads = {});

// Writes the trace CSV and summary JSON into `directory` (created if
// missing).
void write_outputs(const ExperimentResult& result, const std::string& directory);

}  // namespace avglab
