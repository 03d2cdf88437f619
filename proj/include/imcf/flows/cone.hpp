#pragma once

#include "imcf/flows/trace.hpp"

#include <cstddef>
#include <vector>

namespace imcf::flows {

/// Cone {r x : x on the link, 0 <= r <= r_max} over a curve on S^2.
struct ConeSurface {
  geom::SphericalCurve link;
  /// Geodesic curvature of the link per sample.
  std::vector<double> link_curvature;
  double r_max = 1.0;

  /// Mean curvature of the cone at radius r over link sample i: κ_g / r.
  double mean_curvature(std::size_t i, double r) const;
  /// Surface point over link sample i at radius r.
  Vec3 point(std::size_t i, double r) const;
  /// Area of the truncated cone: |link| r_max² / 2.
  double area() const;
  /// Opening angle θ of the round cone with the same link length: cos θ = |link| / 2π.
  double equivalent_angle() const;
  /// Angle from the base plane averaged over the samples, about the best-fit axis.
  double mean_angle() const;
  /// Link within `tol` of a great circle.
  bool is_flat(double tol = 1e-6) const;
};

using ConeState = FlowState<ConeSurface>;
using ConeTrace = FlowTrace<ConeSurface>;

/// Cone over every snapshot of a spherical trace, truncated at r_max. The
/// per-state curvature vector holds the mean curvature on the unit sphere (r = 1).
ConeTrace lift_cone_flow(const SphericalTrace& trace, double r_max = 1.0);

}  // namespace imcf::flows
