#pragma once

#include "imcf/flows/axisym_flow.hpp"
#include "imcf/flows/inner_approximation.hpp"
#include "imcf/flows/policy.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace imcf::lab {

enum class Scenario {
  latitude_circle,
  round_cone,
  cube_link,
  tetra_link,
  ice_cream_cone,
  sphere,
  wedge,
  custom_curve,
  custom_profile,
};

std::string to_string(Scenario s);
/// Throws UsageError for unknown names.
Scenario scenario_from_string(const std::string& s);
const std::vector<Scenario>& all_scenarios();

/// Scenario-specific numbers. Angles are in radians.
struct GeometryParams {
  /// latitude_circle: colatitude of the circle.
  std::optional<double> colatitude_rad;
  /// round_cone, ice_cream_cone: angle of the generating line above the base plane.
  std::optional<double> cone_angle_rad;
  /// ice_cream_cone: slant distance from apex to the cap.
  std::optional<double> slant_length;
  /// sphere: equatorial radius.
  std::optional<double> radius;
  /// sphere: polar semi-axis; a spheroid when it differs from the radius.
  std::optional<double> polar_radius;
  /// wedge: dihedral angle.
  std::optional<double> dihedral_angle_rad;
  /// custom_curve, custom_profile: geometry file, relative to the config file.
  std::optional<std::string> file;

  bool operator==(const GeometryParams&) const = default;
};

struct SolverParams {
  std::size_t samples = 256;
  flows::DtPolicy dt;
  double t_end = 0.25;
  /// Spherical runs stop at length 2π(1 - delta_stop).
  double delta_stop = 1e-3;
  flows::TipRelease tip_release = flows::TipRelease::predicted;
  std::optional<double> release_time;
  double release_angle_rad = 0.1;
  double tip_window = 0.02;
  double smooth_window = 0.1;
  int richardson_order = 1;

  bool operator==(const SolverParams&) const = default;
};

/// Paths are relative to the scenario's output directory.
struct OutputParams {
  std::string trace = "trace.csv";
  double snapshot_interval = 0.01;
  std::string report = "report.txt";
  std::string summary = "summary.json";
  std::string snapshot_dir = "snapshots";
  bool svg = true;

  bool operator==(const OutputParams&) const = default;
};

struct ScenarioConfig {
  std::string name;
  Scenario scenario = Scenario::sphere;
  GeometryParams geometry;
  SolverParams solver;
  /// Empty: direct flow. Otherwise the weak flow over the schedule (curves only).
  flows::EpsilonSchedule epsilon_schedule;
  OutputParams outputs;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  /// Empty selects the scenario's default checks.
  std::vector<std::string> checks;

  bool operator==(const ScenarioConfig&) const = default;
};

/// Parses YAML text. Unknown keys, missing required blocks and invalid values
/// raise UsageError naming the field (dotted path).
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::filesystem::path& path);

/// Canonical YAML; parse_config(emit_config(c)) == c.
std::string emit_config(const ScenarioConfig& config);

/// Field checks shared by the parser and programmatic construction.
void validate(const ScenarioConfig& config);

/// FNV-1a over the canonical YAML.
std::uint64_t config_hash(const ScenarioConfig& config);

/// Check names a scenario runs when the config lists none.
std::vector<std::string> default_checks(Scenario s);
/// Every check name the runner knows.
const std::vector<std::string>& known_checks();

/// Config with the defaults used by the shipped scenario files.
ScenarioConfig preset(Scenario s);

}  // namespace imcf::lab
