#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace imcf::lab {

struct CheckResult {
  std::string name;
  /// What is being compared, in words.
  std::string label;
  std::vector<std::pair<std::string, double>> values;
  double tolerance = 0.0;
  bool pass = false;
  std::string note;

  double value(const std::string& key) const;
};

/// Checks of one scenario run plus run metadata.
struct ScenarioReport {
  std::string scenario;
  std::string name;
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  std::string stop_reason;
  /// Set when the solver failed; the last valid state was dumped.
  std::string failure;
  double seconds = 0.0;
  std::vector<CheckResult> checks;

  bool passed() const;
};

/// One key-value block per check:
///   [check]
///   name: ...
///   label: ...
///   value.<key>: ...
///   tolerance: ...
///   status: pass|fail
///   note: ...
void write_text(std::ostream& os, const ScenarioReport& report);
/// Machine-readable summary (JSON).
void write_summary(std::ostream& os, const ScenarioReport& report);
ScenarioReport read_summary(std::istream& is);

/// Fixed-width pass/fail table with one row per check.
void write_table(std::ostream& os, const std::vector<ScenarioReport>& reports);

/// Every summary file below `dir`, sorted by path.
std::vector<ScenarioReport> collect_summaries(const std::filesystem::path& dir,
                                              const std::string& summary_name = "summary.json");

}  // namespace imcf::lab
