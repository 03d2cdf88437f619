#pragma once

#include <cstddef>
#include <string>

namespace imcf::flows {

enum class TimeScheme {
  /// Normal displacement u solves (I - dt Δ/κ²) u = dt/κ: the curvature
  /// diffusion carried by the speed 1/κ is treated implicitly.
  semi_implicit,
  /// u = dt/κ.
  explicit_euler,
};

std::string to_string(TimeScheme s);
TimeScheme time_scheme_from_string(const std::string& s);

/// Step-size policy shared by the curve and profile evolvers.
struct DtPolicy {
  TimeScheme scheme = TimeScheme::semi_implicit;
  /// Displacement cap: dt <= safety * κ_min * h (and, explicit only,
  /// dt <= safety * κ_min² * h²), h the smallest sample spacing.
  double safety = 0.5;
  double dt_initial = 1e-4;
  double dt_max = 1e-2;
  double dt_min = 1e-13;
  /// Step-doubling tolerance on the sample positions.
  double error_tol = 1e-7;
  bool adaptive = true;
  /// Curvature floor: κ (or H) at or below this stops the step.
  double curvature_floor = 1e-9;
  std::size_t max_steps = 5'000'000;

  bool operator==(const DtPolicy&) const = default;
};

}  // namespace imcf::flows
