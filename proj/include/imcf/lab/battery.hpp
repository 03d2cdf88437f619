#pragma once

#include "imcf/lab/report.hpp"
#include "imcf/spherical_curve.hpp"

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

namespace imcf::lab {

enum class Suite { fast, full };

/// Throws UsageError for names other than "fast" and "full".
Suite suite_from_string(const std::string& s);

struct CriterionResult {
  int id = 0;
  std::string title;
  CheckResult check;
  /// Implemented as stated and expected to fail; see the README.
  bool unattainable = false;
  double seconds = 0.0;
};

struct BatteryOptions {
  std::uint64_t seed = 1;
  /// Concurrent members inside weak flows.
  std::size_t workers = 1;
  /// Criterion ids to run; empty runs all.
  std::vector<int> only;
};

inline constexpr int kCriterionCount = 11;

/// The acceptance criteria at their stated resolutions. The full suite adds
/// refinement studies with fitted convergence orders.
std::vector<CriterionResult> run_battery(Suite suite, const BatteryOptions& options = {});

/// One line per criterion: "criterion N PASS|FAIL ..." with the key values.
void write_battery_table(std::ostream& os, const std::vector<CriterionResult>& results);

/// True when every criterion passes or fails only as unattainable.
bool battery_ok(const std::vector<CriterionResult>& results);

/// Convex spherical polygon from the convex hull of 3 to 12 uniform points in
/// a gnomonic disk of angular radius in [0.05, 1.55] about a uniform pole.
geom::SphericalCurve random_convex_polygon(std::mt19937_64& rng, std::size_t samples);

}  // namespace imcf::lab
