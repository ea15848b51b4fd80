#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pcbench/config_io.hpp"
#include "pcbench/eval.hpp"
#include "pcbench/metrics.hpp"

namespace pcbench {

struct OracleOverrides {
  std::optional<std::size_t> horizon;
  std::optional<int> max_iterations;
  std::optional<double> tolerance;
  std::optional<int> multistart;
};

/// Everything needed to reproduce a rollout or comparison; serialized as the run manifest.
struct RunOptions {
  std::string scenario;               // path
  std::vector<std::string> policies;  // policy specs
  std::string reference;              // policy spec used for gaps; empty = none (rollout) or "oracle" (compare)
  bool compare = false;
  std::size_t episodes = 1;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
  std::optional<double> gamma;  // scenario value when absent
  Normalization normalization = Normalization::per_step;
  long long timeout_ms = 10000;
  OracleOverrides oracle;
  std::string out_dir;  // empty = nothing written
};

nlohmann::json to_json(const RunOptions& o);
RunOptions run_options_from_json(const nlohmann::json& j);

struct RunResult {
  Scenario scenario;
  RunOptions options;
  std::vector<EvaluationReport> reports;              // one per policy, reference included
  std::vector<std::vector<EpisodeRecord>> episodes;   // parallel to reports
  std::optional<std::size_t> reference_index;
};

OracleSettings apply_overrides(OracleSettings base, const OracleOverrides& o);

RunResult execute(const RunOptions& options);

/// Writes CSVs, reports and the manifest. A single policy writes into out_dir
/// directly; several policies get one subdirectory each plus comparison files.
void write_outputs(const RunResult& result, const std::string& out_dir);

nlohmann::json summary_json(const RunResult& result);

/// First failure category across all reports, if any episode failed.
std::optional<ErrorCode> first_failure(const RunResult& result);

}  // namespace pcbench
