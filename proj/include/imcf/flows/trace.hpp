#pragma once

#include "imcf/axisym_profile.hpp"
#include "imcf/spherical_curve.hpp"

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace imcf::flows {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Geometry at one time with its per-sample curvature (geodesic curvature for
/// curves on S^2, mean curvature for profiles).
template <class Geometry>
struct FlowState {
  double t = 0.0;
  Geometry geometry;
  std::vector<double> curvature;
  std::size_t step_index = 0;
};

/// Per-state (or per-step) summary numbers.
struct Diagnostics {
  std::size_t step = 0;
  double t = 0.0;
  /// Length (curves) or area (surfaces).
  double measure = 0.0;
  double kappa_min = 0.0;
  double kappa_max = 0.0;
  double tip_r = kNaN;
  double tip_z = kNaN;
  std::vector<std::pair<std::string, double>> monitors;

  double monitor(const std::string& name) const {
    for (const auto& [k, v] : monitors)
      if (k == name) return v;
    return kNaN;
  }
  void set_monitor(const std::string& name, double value) {
    for (auto& [k, v] : monitors)
      if (k == name) {
        v = value;
        return;
      }
    monitors.emplace_back(name, value);
  }
};

/// Snapshots at the requested times (plus the final state) with aligned
/// diagnostics, and a log with one diagnostics row per accepted step.
template <class Geometry>
struct FlowTrace {
  std::vector<FlowState<Geometry>> states;
  std::vector<Diagnostics> diagnostics;
  std::vector<Diagnostics> step_log;
  std::optional<double> epsilon;
  std::uint64_t config_hash = 0;
  std::string stop_reason;
  /// Time at which a held conical tip was released (profile flows).
  std::optional<double> tip_release_time;
  /// Tip held fixed at the start of the run.
  bool had_tip = false;

  std::size_t size() const { return states.size(); }
  bool empty() const { return states.empty(); }
  double t_end() const { return states.empty() ? 0.0 : states.back().t; }
};

using SphericalState = FlowState<geom::SphericalCurve>;
using ProfileState = FlowState<geom::AxisymProfile>;
using SphericalTrace = FlowTrace<geom::SphericalCurve>;
using ProfileTrace = FlowTrace<geom::AxisymProfile>;

}  // namespace imcf::flows
