#pragma once

#include "imcf/lab/config.hpp"
#include "imcf/lab/report.hpp"

#include <filesystem>
#include <optional>
#include <vector>

namespace imcf::lab {

struct RunContext {
  /// Scenario outputs go to out_root / config.name.
  std::filesystem::path out_root = "imcf-lab-out";
  /// Directory relative geometry files are resolved against.
  std::filesystem::path config_dir = ".";
  std::optional<std::uint64_t> seed_override = std::nullopt;
};

/// Builds the geometry, runs the flow(s) and the configured checks, and writes
/// the trace CSV, snapshots, text report and summary. A solver failure is
/// recorded in the report and the last valid state is written to
/// `failure/` in the output directory; it does not throw. Invalid configs and
/// unusable output directories raise UsageError.
ScenarioReport run_scenario(const ScenarioConfig& config, const RunContext& context);

struct BatchItem {
  ScenarioConfig config;
  std::filesystem::path config_dir = ".";
};

/// Runs up to `workers` scenarios concurrently. Names must be unique, since
/// each scenario owns its output directory. Reports come back in input order.
std::vector<ScenarioReport> run_batch(const std::vector<BatchItem>& items, const RunContext& context,
                                      std::size_t workers);

}  // namespace imcf::lab
