#include "imcf/convex_geom.hpp"

#include "imcf/detail/extrapolate.hpp"
#include "imcf/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace imcf::geom {

namespace {

// Signed area of triangle (0, a, b) intersected with the disk of radius R about 0.
double triangle_disk_area(const Vec2& a, const Vec2& b, double R) {
  const Vec2 d = b - a;
  const double A = d.squaredNorm();
  if (A == 0.0) return 0.0;
  const double B = a.dot(d);
  const double C = a.squaredNorm() - R * R;
  std::vector<double> cuts = {0.0};
  const double disc = B * B - A * C;
  if (disc > 0.0) {
    const double sq = std::sqrt(disc);
    for (double t : {(-B - sq) / A, (-B + sq) / A})
      if (t > 0.0 && t < 1.0) cuts.push_back(t);
  }
  cuts.push_back(1.0);
  double area = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const Vec2 p = a + cuts[k] * d;
    const Vec2 q = a + cuts[k + 1] * d;
    const Vec2 mid = a + 0.5 * (cuts[k] + cuts[k + 1]) * d;
    if (mid.squaredNorm() <= R * R)
      area += 0.5 * cross2(p, q);
    else
      area += 0.5 * R * R * std::atan2(cross2(p, q), p.dot(q));
  }
  return area;
}

}  // namespace

double PolytopeSampler::area_in_ball(const Vec3& p, double r) const {
  double total = 0.0;
  for (std::size_t f = 0; f < polytope_.faces().size(); ++f) {
    const Vec3& n = polytope_.face_normals()[f];
    const double h = n.dot(p) - polytope_.face_offsets()[f];
    if (std::abs(h) >= r) continue;
    const double R = std::sqrt(r * r - h * h);
    const Vec3 q = p - h * n;
    const auto [e1, e2] = orthonormal_complement(n);
    const auto& face = polytope_.faces()[f];
    double a = 0.0;
    for (std::size_t k = 0; k < face.size(); ++k) {
      const Vec3 u = polytope_.vertices()[face[k]] - q;
      const Vec3 w = polytope_.vertices()[face[(k + 1) % face.size()]] - q;
      a += triangle_disk_area(Vec2(u.dot(e1), u.dot(e2)), Vec2(w.dot(e1), w.dot(e2)), R);
    }
    total += std::abs(a);
  }
  return total;
}

double PolytopeSampler::isolation_radius(const Vec3& p) const {
  double r = std::numeric_limits<double>::infinity();
  const double tol = 1e-9 * std::max(1.0, p.norm());
  for (std::size_t f = 0; f < polytope_.faces().size(); ++f) {
    const double h = polytope_.face_offsets()[f] - polytope_.face_normals()[f].dot(p);
    if (h > tol) r = std::min(r, h);
  }
  return r;
}

namespace {

void require_on_axis(const Vec3& p) {
  if (std::hypot(p.x(), p.y()) > 1e-12) throw DomainError("profile ball sampler supports points on the axis only");
}

}  // namespace

double ProfileSampler::area_in_ball(const Vec3& p, double r) const {
  require_on_axis(p);
  const Vec2 c(0.0, p.z());
  const auto s = profile_.samples();
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    const Vec2 a = s[i] - c;
    const Vec2 d = s[i + 1] - s[i];
    const double A = d.squaredNorm();
    const double B = a.dot(d);
    const double C = a.squaredNorm() - r * r;
    const double disc = B * B - A * C;
    if (disc <= 0.0) continue;
    const double sq = std::sqrt(disc);
    const double t0 = std::max(0.0, (-B - sq) / A);
    const double t1 = std::min(1.0, (-B + sq) / A);
    if (t1 <= t0) continue;
    const Vec2 P = s[i] + t0 * d;
    const Vec2 Q = s[i] + t1 * d;
    total += kPi * (P.x() + Q.x()) * (Q - P).norm();
  }
  return total;
}

double ProfileSampler::isolation_radius(const Vec3& p) const {
  require_on_axis(p);
  const Vec2 c(0.0, p.z());
  double r = std::numeric_limits<double>::infinity();
  const auto s = profile_.samples();
  for (const auto& x : {s.front(), s.back()}) {
    const double d = (x - c).norm();
    if (std::abs(x.x()) <= profile_.tolerance() && d > 1e-12) r = std::min(r, d);
  }
  return r;
}

Density density_ball_ratio(const SurfaceSampler& sampler, const Vec3& p, std::span<const double> radii) {
  if (radii.empty()) throw DomainError("ball-ratio density needs at least one radius");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(radii[i] > 0.0)) throw DomainError("ball radii must be positive");
    if (i > 0 && !(radii[i] < radii[i - 1])) throw DomainError("ball radii must be strictly decreasing");
  }
  if (!(radii.front() < sampler.isolation_radius(p)))
    throw DomainError("largest ball radius reaches geometry away from the point");

  std::vector<double> ratio;
  ratio.reserve(radii.size());
  for (double r : radii) ratio.push_back(sampler.area_in_ball(p, r) / (kPi * r * r));
  return {detail::neville_at_zero(radii, ratio), DensityMethod::ball_ratio};
}

}  // namespace imcf::geom
