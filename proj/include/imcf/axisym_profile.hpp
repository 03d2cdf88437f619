#pragma once

#include "imcf/sphere_math.hpp"

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace imcf::geom {

/// Generating curve of a rotationally symmetric surface in R^3, written in the
/// (r, z) half-plane with r the distance to the z-axis.
///
/// Samples run counterclockwise: from the lower axis point, out through r > 0,
/// back to the upper axis point, so the enclosed body lies to the left and the
/// outward normal of a segment with tangent (r', z') is (z', -r').
/// A closed profile starts and ends on the axis; an open one is a truncated
/// piece of a non-compact surface. `tip_index`, when set, marks a conical
/// axis point held by the flow.
class AxisymProfile {
 public:
  AxisymProfile() = default;
  AxisymProfile(std::vector<Vec2> samples, bool closed, std::optional<std::size_t> tip_index = std::nullopt,
                double tolerance = 1e-10);

  std::span<const Vec2> samples() const { return samples_; }
  const Vec2& operator[](std::size_t i) const { return samples_[i]; }
  std::size_t size() const { return samples_.size(); }
  bool closed() const { return closed_; }
  std::optional<std::size_t> tip_index() const { return tip_; }
  double tolerance() const { return tolerance_; }

  AxisymProfile with_tip(std::optional<std::size_t> tip) const;

  /// Arclength of the polyline.
  double length() const;
  /// Area of the surface of revolution generated by the polyline (frustum sum).
  double surface_area() const;
  /// Volume enclosed by a closed profile (Pappus over the polygon).
  double volume() const;

 private:
  std::vector<Vec2> samples_;
  bool closed_ = true;
  std::optional<std::size_t> tip_;
  double tolerance_ = 1e-10;
};

/// Uniform-arclength samples of a parametrized profile s in [0,1] -> (r,z).
template <class F>
std::vector<Vec2> sample_by_arclength(F&& param, std::size_t samples, std::size_t oversample = 64);

/// Round sphere of radius R centred on the axis at height zc.
AxisymProfile sphere_profile(double radius, std::size_t samples, double zc = 0.0);

/// Spheroid with equatorial semi-axis a and polar semi-axis b.
AxisymProfile spheroid_profile(double a, double b, std::size_t samples);

/// Cone with apex at the origin, generating line at angle theta0 above the
/// base plane, capped by the sphere tangent to the cone along the circle at
/// slant distance `slant` from the apex. The apex is marked as tip.
AxisymProfile ice_cream_cone(double theta0, double slant, std::size_t samples);

/// Truncated cylinder of radius R between heights z0 and z1 (open profile).
AxisymProfile truncated_cylinder(double radius, double z0, double z1, std::size_t samples);

// ---------------------------------------------------------------------------

template <class F>
std::vector<Vec2> sample_by_arclength(F&& param, std::size_t samples, std::size_t oversample) {
  const std::size_t dense = std::max<std::size_t>(samples * oversample, 16);
  std::vector<Vec2> pts(dense + 1);
  std::vector<double> s(dense + 1, 0.0);
  for (std::size_t k = 0; k <= dense; ++k) {
    pts[k] = param(static_cast<double>(k) / static_cast<double>(dense));
    if (k > 0) s[k] = s[k - 1] + (pts[k] - pts[k - 1]).norm();
  }
  std::vector<Vec2> out;
  out.reserve(samples);
  std::size_t seg = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    const double target = s.back() * static_cast<double>(i) / static_cast<double>(samples - 1);
    while (seg + 1 < dense && s[seg + 1] < target) ++seg;
    const double len = s[seg + 1] - s[seg];
    const double tau = len > 0.0 ? (target - s[seg]) / len : 0.0;
    // Refine within the dense segment on the true parametrization.
    const double u = (static_cast<double>(seg) + std::clamp(tau, 0.0, 1.0)) / static_cast<double>(dense);
    out.push_back(param(u));
  }
  return out;
}

}  // namespace imcf::geom
