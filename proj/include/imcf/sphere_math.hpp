#pragma once

// Small vector helpers shared by the spherical and Euclidean code.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>

namespace imcf {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Great-circle distance between two unit vectors, accurate for near and
/// near-antipodal pairs.
inline double arc_angle(const Vec3& a, const Vec3& b) {
  return std::atan2(a.cross(b).norm(), a.dot(b));
}

/// Point at fraction `tau` along the minor great-circle arc from a to b.
inline Vec3 slerp(const Vec3& a, const Vec3& b, double tau) {
  const double omega = arc_angle(a, b);
  if (omega < 1e-12) return ((1.0 - tau) * a + tau * b).normalized();
  const double s = std::sin(omega);
  return (std::sin((1.0 - tau) * omega) / s) * a + (std::sin(tau * omega) / s) * b;
}

/// Orthonormal pair spanning the plane orthogonal to unit vector n.
inline std::pair<Vec3, Vec3> orthonormal_complement(const Vec3& n) {
  const Vec3 seed = std::abs(n.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  Vec3 e1 = (seed - seed.dot(n) * n).normalized();
  Vec3 e2 = n.cross(e1);
  return {e1, e2};
}

/// Component of v tangent to the sphere at unit vector x.
inline Vec3 tangent_part(const Vec3& v, const Vec3& x) { return v - v.dot(x) * x; }

/// Move a point of the unit sphere a geodesic distance `s` along unit tangent `dir`.
inline Vec3 geodesic_move(const Vec3& x, const Vec3& dir, double s) {
  return (std::cos(s) * x + std::sin(s) * dir).normalized();
}

/// Signed geodesic curvature of the circle through three points of the unit
/// sphere, positive when a -> b -> c turns counterclockwise seen from outside.
/// The circle lies in the plane through the three points; if that plane is at
/// distance d from the origin the circle has angular radius acos(d) and
/// geodesic curvature d / sqrt(1 - d^2).
inline double three_point_geodesic_curvature(const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 m = (b - a).cross(c - b);
  const double mn = m.norm();
  if (mn == 0.0) return 0.0;
  const double d = std::clamp(m.dot(b) / mn, -1.0, 1.0);
  return d / std::sqrt(std::max(1.0 - d * d, 1e-300));
}

/// Signed curvature of the planar circle through three points, positive for a
/// counterclockwise turn.
inline double three_point_curvature(const Vec2& a, const Vec2& b, const Vec2& c) {
  const Vec2 u = b - a;
  const Vec2 v = c - b;
  const Vec2 w = c - a;
  const double cross = u.x() * v.y() - u.y() * v.x();
  const double denom = u.norm() * v.norm() * w.norm();
  if (denom == 0.0) return 0.0;
  return 2.0 * cross / denom;
}

inline double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

}  // namespace imcf
