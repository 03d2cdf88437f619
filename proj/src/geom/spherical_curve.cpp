#include "imcf/spherical_curve.hpp"

#include "imcf/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace imcf::geom {

SphericalCurve::SphericalCurve(std::vector<Vec3> points, std::vector<bool> corner_flags, double tolerance)
    : points_(std::move(points)), corners_(std::move(corner_flags)), tolerance_(tolerance) {
  if (points_.size() < 3) throw MalformedInput("spherical curve needs at least 3 points");
  if (corners_.empty()) corners_.assign(points_.size(), false);
  if (corners_.size() != points_.size()) throw MalformedInput("corner flags do not match point count");
  if (!(tolerance_ > 0.0)) throw MalformedInput("tolerance must be positive");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const double n = points_[i].norm();
    if (!std::isfinite(n) || std::abs(n - 1.0) > std::max(tolerance_, 1e-12) * 10.0)
      throw MalformedInput("spherical curve point " + std::to_string(i) + " is not a unit vector");
  }
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if ((points_[i] - points_[(i + 1) % points_.size()]).norm() == 0.0)
      throw MalformedInput("spherical curve has repeated consecutive samples at " + std::to_string(i));
  }
}

const Vec3& SphericalCurve::wrap(std::ptrdiff_t i) const {
  const auto n = static_cast<std::ptrdiff_t>(points_.size());
  return points_[static_cast<std::size_t>(((i % n) + n) % n)];
}

SphericalCurve& SphericalCurve::with_polygon_corners(std::vector<Vec3> corners) {
  polygon_ = std::move(corners);
  return *this;
}

SphericalCurve& SphericalCurve::with_exact_length(double length) {
  exact_length_ = length;
  return *this;
}

SphericalCurve SphericalCurve::reversed() const {
  std::vector<Vec3> pts(points_.rbegin(), points_.rend());
  std::vector<bool> flags(corners_.rbegin(), corners_.rend());
  SphericalCurve out(std::move(pts), std::move(flags), tolerance_);
  out.polygon_.assign(polygon_.rbegin(), polygon_.rend());
  out.exact_length_ = exact_length_;
  return out;
}

SphericalCurve SphericalCurve::rotated(const Mat3& R) const {
  std::vector<Vec3> pts;
  pts.reserve(points_.size());
  for (const auto& p : points_) pts.push_back((R * p).normalized());
  SphericalCurve out(std::move(pts), corners_, tolerance_);
  for (const auto& c : polygon_) out.polygon_.push_back((R * c).normalized());
  out.exact_length_ = exact_length_;
  return out;
}

SphericalCurve latitude_circle(double alpha, std::size_t samples, const Vec3& pole) {
  if (!(alpha > 0.0 && alpha <= kPi / 2.0 + 1e-15)) throw DomainError("latitude circle colatitude must be in (0, pi/2]");
  if (samples < 3) throw MalformedInput("latitude circle needs at least 3 samples");
  const Vec3 c = pole.normalized();
  const auto [e1, e2] = orthonormal_complement(c);
  std::vector<Vec3> pts;
  pts.reserve(samples);
  const double sa = std::sin(alpha);
  const double ca = std::cos(alpha);
  for (std::size_t k = 0; k < samples; ++k) {
    const double phi = kTwoPi * static_cast<double>(k) / static_cast<double>(samples);
    pts.push_back((ca * c + sa * (std::cos(phi) * e1 + std::sin(phi) * e2)).normalized());
  }
  SphericalCurve out(std::move(pts));
  out.with_exact_length(kTwoPi * sa);
  return out;
}

SphericalCurve great_circle(std::size_t samples, const Vec3& normal) {
  return latitude_circle(kPi / 2.0, samples, normal);
}

SphericalCurve spherical_polygon(const std::vector<Vec3>& corners, std::size_t samples) {
  const std::size_t m = corners.size();
  if (m < 2) throw MalformedInput("spherical polygon needs at least 2 corners");
  if (samples < m) throw MalformedInput("spherical polygon needs at least one sample per corner");
  std::vector<Vec3> unit;
  unit.reserve(m);
  for (const auto& c : corners) unit.push_back(c.normalized());

  std::vector<double> side(m);
  for (std::size_t i = 0; i < m; ++i) side[i] = arc_angle(unit[i], unit[(i + 1) % m]);
  const double total = std::accumulate(side.begin(), side.end(), 0.0);

  // Largest-remainder allocation of the non-corner samples to the sides.
  const std::size_t interior = samples - m;
  std::vector<std::size_t> count(m);
  std::vector<std::pair<double, std::size_t>> rest;
  std::size_t used = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double share = static_cast<double>(samples) * side[i] / total - 1.0;
    const double clipped = std::max(share, 0.0);
    count[i] = static_cast<std::size_t>(std::floor(clipped));
    used += count[i];
    rest.emplace_back(clipped - std::floor(clipped), i);
  }
  while (used > interior) {
    auto it = std::max_element(count.begin(), count.end());
    --*it;
    --used;
  }
  std::sort(rest.begin(), rest.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  for (std::size_t k = 0; used < interior; k = (k + 1) % m) {
    ++count[rest[k].second];
    ++used;
  }

  std::vector<Vec3> pts;
  std::vector<bool> flags;
  pts.reserve(samples);
  for (std::size_t i = 0; i < m; ++i) {
    pts.push_back(unit[i]);
    flags.push_back(true);
    const Vec3& a = unit[i];
    const Vec3& b = unit[(i + 1) % m];
    for (std::size_t k = 1; k <= count[i]; ++k) {
      pts.push_back(slerp(a, b, static_cast<double>(k) / static_cast<double>(count[i] + 1)));
      flags.push_back(false);
    }
  }
  SphericalCurve out(std::move(pts), std::move(flags));
  out.with_polygon_corners(unit).with_exact_length(total);
  return out;
}

SphericalCurve cube_corner_triangle(std::size_t samples) {
  // e1 -> e2 -> e3 is counterclockwise around (1,1,1) seen from outside.
  return spherical_polygon({Vec3::UnitX(), Vec3::UnitY(), Vec3::UnitZ()}, samples);
}

SphericalCurve wedge_curve(double theta0, std::size_t samples, const Vec3& axis, const Vec3& first_direction) {
  if (!(theta0 > 0.0 && theta0 < kPi)) throw DomainError("wedge dihedral angle must lie in (0, pi)");
  if (samples < 6) throw MalformedInput("wedge curve needs at least 6 samples");
  const Vec3 a = axis.normalized();
  const Vec3 u1 = tangent_part(first_direction, a).normalized();
  const Vec3 w = a.cross(u1);
  const Vec3 u2 = std::cos(theta0) * u1 + std::sin(theta0) * w;

  // Half circle along u1 from a to -a, then along u2 from -a back to a.
  const std::size_t half = samples / 2;
  std::vector<Vec3> pts;
  std::vector<bool> flags;
  auto arc = [&](const Vec3& from, const Vec3& dir, std::size_t count) {
    for (std::size_t k = 0; k < count; ++k) {
      const double phi = kPi * static_cast<double>(k) / static_cast<double>(count);
      pts.push_back((std::cos(phi) * from + std::sin(phi) * dir).normalized());
      flags.push_back(k == 0);
    }
  };
  arc(a, u1, half);
  arc(-a, u2, samples - half);

  // Orientation: counterclockwise around the bisector of the two half-planes.
  const Vec3 inside = (u1 + u2).normalized();
  double turn = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) turn += pts[i].cross(pts[(i + 1) % pts.size()]).dot(inside);
  SphericalCurve out(std::move(pts), std::move(flags));
  out.with_exact_length(kTwoPi);
  return turn >= 0.0 ? out : out.reversed();
}

}  // namespace imcf::geom
