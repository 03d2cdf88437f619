#include "imcf/flows/cone.hpp"

#include "imcf/convex_geom.hpp"
#include "imcf/error.hpp"
#include "imcf/flows/spherical_flow.hpp"

#include <algorithm>
#include <cmath>

namespace imcf::flows {

double ConeSurface::mean_curvature(std::size_t i, double r) const {
  if (!(r > 0.0)) throw DomainError("cone mean curvature is undefined at the apex");
  return link_curvature.at(i) / r;
}

Vec3 ConeSurface::point(std::size_t i, double r) const { return r * link[i]; }

double ConeSurface::area() const { return 0.5 * geom::spherical_length(link) * r_max * r_max; }

double ConeSurface::equivalent_angle() const {
  return std::acos(std::clamp(geom::spherical_length(link) / kTwoPi, -1.0, 1.0));
}

double ConeSurface::mean_angle() const {
  Vec3 c = Vec3::Zero();
  for (const auto& p : link.points()) c += p;
  if (c.norm() < 1e-14) return 0.0;
  c.normalize();
  double theta = 0.0;
  for (const auto& p : link.points()) theta += kPi / 2.0 - std::acos(std::clamp(p.dot(c), -1.0, 1.0));
  return theta / static_cast<double>(link.size());
}

bool ConeSurface::is_flat(double tol) const { return great_circle_residual(link.points()) <= tol; }

ConeTrace lift_cone_flow(const SphericalTrace& trace, double r_max) {
  if (!(r_max > 0.0)) throw DomainError("cone truncation radius must be positive");
  ConeTrace out;
  out.epsilon = trace.epsilon;
  out.config_hash = trace.config_hash;
  out.stop_reason = trace.stop_reason;
  out.states.reserve(trace.size());
  for (std::size_t k = 0; k < trace.size(); ++k) {
    const auto& s = trace.states[k];
    ConeState c;
    c.t = s.t;
    c.step_index = s.step_index;
    c.geometry.link = s.geometry;
    c.geometry.link_curvature = s.curvature;
    c.geometry.r_max = r_max;
    c.curvature = s.curvature;
    Diagnostics d = trace.diagnostics[k];
    d.measure = c.geometry.area();
    d.tip_r = 0.0;
    d.tip_z = 0.0;
    d.set_monitor("cone_angle", c.geometry.mean_angle());
    d.set_monitor("cone_angle_equivalent", c.geometry.equivalent_angle());
    out.states.push_back(std::move(c));
    out.diagnostics.push_back(std::move(d));
  }
  return out;
}

}  // namespace imcf::flows
