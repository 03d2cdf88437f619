#include "imcf/axisym_profile.hpp"

#include "imcf/error.hpp"

#include <cmath>
#include <string>

namespace imcf::geom {

AxisymProfile::AxisymProfile(std::vector<Vec2> samples, bool closed, std::optional<std::size_t> tip_index,
                             double tolerance)
    : samples_(std::move(samples)), closed_(closed), tip_(tip_index), tolerance_(tolerance) {
  if (samples_.size() < 3) throw MalformedInput("axisymmetric profile needs at least 3 samples");
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    if (!samples_[i].allFinite()) throw MalformedInput("profile sample " + std::to_string(i) + " is not finite");
    if (samples_[i].x() < -tolerance_) throw MalformedInput("profile sample " + std::to_string(i) + " has r < 0");
  }
  for (std::size_t i = 0; i + 1 < samples_.size(); ++i) {
    if ((samples_[i + 1] - samples_[i]).norm() == 0.0)
      throw MalformedInput("profile has repeated samples at " + std::to_string(i));
  }
  if (closed_) {
    if (std::abs(samples_.front().x()) > tolerance_ || std::abs(samples_.back().x()) > tolerance_)
      throw MalformedInput("closed profile must start and end on the axis");
    samples_.front().x() = 0.0;
    samples_.back().x() = 0.0;
  }
  if (tip_ && *tip_ != 0 && *tip_ + 1 != samples_.size())
    throw MalformedInput("conical tip must be an axis endpoint of the profile");
  if (tip_ && std::abs(samples_[*tip_].x()) > tolerance_) throw MalformedInput("conical tip must lie on the axis");
}

AxisymProfile AxisymProfile::with_tip(std::optional<std::size_t> tip) const {
  AxisymProfile out = *this;
  out.tip_ = tip;
  return out;
}

double AxisymProfile::length() const {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < samples_.size(); ++i) s += (samples_[i + 1] - samples_[i]).norm();
  return s;
}

double AxisymProfile::surface_area() const {
  double a = 0.0;
  for (std::size_t i = 0; i + 1 < samples_.size(); ++i)
    a += kPi * (samples_[i].x() + samples_[i + 1].x()) * (samples_[i + 1] - samples_[i]).norm();
  return a;
}

double AxisymProfile::volume() const {
  // V = 2 pi * integral of r dA over the half-plane region, via Green's theorem
  // on the polygon closed along the axis.
  double v = 0.0;
  const std::size_t n = samples_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& p = samples_[i];
    const Vec2& q = samples_[(i + 1) % n];
    // integral of r dA = (1/2) oint r^2 dz for counterclockwise boundaries.
    v += 0.5 * (p.x() * p.x() + p.x() * q.x() + q.x() * q.x()) / 3.0 * (q.y() - p.y());
  }
  return kTwoPi * v;
}

AxisymProfile sphere_profile(double radius, std::size_t samples, double zc) {
  if (!(radius > 0.0)) throw DomainError("sphere radius must be positive");
  std::vector<Vec2> pts(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    const double phi = kPi * static_cast<double>(i) / static_cast<double>(samples - 1);
    pts[i] = Vec2(radius * std::sin(phi), zc - radius * std::cos(phi));
  }
  pts.front().x() = 0.0;
  pts.back().x() = 0.0;
  return AxisymProfile(std::move(pts), true);
}

AxisymProfile spheroid_profile(double a, double b, std::size_t samples) {
  if (!(a > 0.0 && b > 0.0)) throw DomainError("spheroid semi-axes must be positive");
  auto param = [a, b](double u) {
    const double phi = kPi * u;
    return Vec2(a * std::sin(phi), -b * std::cos(phi));
  };
  auto pts = sample_by_arclength(param, samples);
  pts.front().x() = 0.0;
  pts.back().x() = 0.0;
  return AxisymProfile(std::move(pts), true);
}

AxisymProfile ice_cream_cone(double theta0, double slant, std::size_t samples) {
  if (!(theta0 > 0.0 && theta0 < kPi / 2.0)) throw DomainError("cone angle must lie in (0, pi/2)");
  if (!(slant > 0.0)) throw DomainError("cone slant length must be positive");
  const Vec2 dir(std::cos(theta0), std::sin(theta0));
  const double zc = slant / std::sin(theta0);
  const double R = slant / std::tan(theta0);
  const double psi0 = theta0 - kPi / 2.0;
  const double total = slant + R * (kPi / 2.0 - psi0);
  std::vector<Vec2> pts(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    const double s = total * static_cast<double>(i) / static_cast<double>(samples - 1);
    if (s <= slant) {
      pts[i] = s * dir;
    } else {
      const double psi = psi0 + (s - slant) / R;
      pts[i] = Vec2(R * std::cos(psi), zc + R * std::sin(psi));
    }
  }
  pts.front() = Vec2::Zero();
  pts.back().x() = 0.0;
  return AxisymProfile(std::move(pts), true, 0);
}

AxisymProfile truncated_cylinder(double radius, double z0, double z1, std::size_t samples) {
  if (!(radius > 0.0) || !(z1 > z0)) throw DomainError("cylinder needs positive radius and z1 > z0");
  std::vector<Vec2> pts(samples);
  for (std::size_t i = 0; i < samples; ++i)
    pts[i] = Vec2(radius, z0 + (z1 - z0) * static_cast<double>(i) / static_cast<double>(samples - 1));
  return AxisymProfile(std::move(pts), false);
}

}  // namespace imcf::geom
