#pragma once

#include "imcf/sphere_math.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace imcf::geom {

inline constexpr double kDefaultTolerance = 1e-8;

/// Closed polyline on the unit 2-sphere. Consecutive samples are joined by
/// minor great-circle arcs; the last sample connects back to the first.
///
/// Construction only checks that the data are usable (at least three samples,
/// unit norms, no repeated consecutive samples). Convexity and simplicity are
/// properties that `convexity_check` reports on.
class SphericalCurve {
 public:
  SphericalCurve() = default;
  explicit SphericalCurve(std::vector<Vec3> points, std::vector<bool> corner_flags = {},
                          double tolerance = kDefaultTolerance);

  std::span<const Vec3> points() const { return points_; }
  const std::vector<bool>& corner_flags() const { return corners_; }
  double tolerance() const { return tolerance_; }
  std::size_t size() const { return points_.size(); }
  const Vec3& operator[](std::size_t i) const { return points_[i]; }
  const Vec3& wrap(std::ptrdiff_t i) const;

  /// Corners of the spherical polygon this curve samples, when the samples are
  /// known to lie on great-circle sides joining them. Lengths and densities
  /// are then evaluated from the corners instead of the samples.
  const std::vector<Vec3>& polygon_corners() const { return polygon_; }
  SphericalCurve& with_polygon_corners(std::vector<Vec3> corners);

  /// Closed-form length attached by a constructor that knows it.
  std::optional<double> exact_length() const { return exact_length_; }
  SphericalCurve& with_exact_length(double length);

  /// Same samples in reverse order.
  SphericalCurve reversed() const;
  /// Same samples rotated by R (exact data carried along).
  SphericalCurve rotated(const Mat3& R) const;

 private:
  std::vector<Vec3> points_;
  std::vector<bool> corners_;
  double tolerance_ = kDefaultTolerance;
  std::vector<Vec3> polygon_;
  std::optional<double> exact_length_;
};

// Constructors for the curves used throughout the lab. All produce
// counterclockwise orientation seen from outside the sphere around the
// enclosed region.

/// Circle of colatitude `alpha` around `pole`, `samples` equally spaced points.
SphericalCurve latitude_circle(double alpha, std::size_t samples, const Vec3& pole = Vec3::UnitZ());

/// Great circle orthogonal to `normal`.
SphericalCurve great_circle(std::size_t samples, const Vec3& normal = Vec3::UnitZ());

/// Spherical polygon with great-circle sides through `corners` (given in
/// counterclockwise order), sampled uniformly by arclength with every corner
/// included and flagged.
SphericalCurve spherical_polygon(const std::vector<Vec3>& corners, std::size_t samples);

/// Link of a cube corner: the geodesic triangle e1, e2, e3.
SphericalCurve cube_corner_triangle(std::size_t samples);

/// Wedge curve: two half great circles from `axis` to `-axis` whose
/// half-planes meet at dihedral angle theta0. The first half-plane contains
/// `first_direction` (orthogonal to `axis`).
SphericalCurve wedge_curve(double theta0, std::size_t samples, const Vec3& axis = Vec3::UnitZ(),
                           const Vec3& first_direction = Vec3::UnitY());

}  // namespace imcf::geom
