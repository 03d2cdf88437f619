#include "imcf/flows/spherical_flow.hpp"

#include "imcf/convex_geom.hpp"
#include "imcf/detail/tridiag.hpp"
#include "imcf/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace imcf::flows {

std::string to_string(TimeScheme s) { return s == TimeScheme::explicit_euler ? "explicit_euler" : "semi_implicit"; }

TimeScheme time_scheme_from_string(const std::string& s) {
  if (s == "semi_implicit") return TimeScheme::semi_implicit;
  if (s == "explicit_euler") return TimeScheme::explicit_euler;
  throw UsageError("unknown time scheme '" + s + "' (expected semi_implicit or explicit_euler)");
}

std::vector<double> geodesic_curvatures(std::span<const Vec3> pts) {
  const std::size_t n = pts.size();
  std::vector<double> k(n);
  for (std::size_t i = 0; i < n; ++i)
    k[i] = three_point_geodesic_curvature(pts[(i + n - 1) % n], pts[i], pts[(i + 1) % n]);
  return k;
}

std::vector<Vec3> spherical_outward_normals(std::span<const Vec3> pts) {
  const std::size_t n = pts.size();
  std::vector<Vec3> nu(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 tangent = pts[(i + 1) % n] - pts[(i + n - 1) % n];
    nu[i] = tangent.cross(pts[i]).normalized();
  }
  return nu;
}

namespace {

// Point at fraction tau of the way from b to c along the circle through a, b, c
// (great-circle arc if the three are collinear on the sphere).
Vec3 circle_interpolate(const Vec3& a, const Vec3& b, const Vec3& c, double tau) {
  const Vec3 m = (b - a).cross(c - b);
  const double mn = m.norm();
  if (mn < 1e-10 * (b - a).norm() * (c - b).norm()) return slerp(b, c, tau);
  const Vec3 pole = m / mn;
  const double d = std::clamp(pole.dot(b), -1.0, 1.0);
  const Vec3 pb = b - d * pole;
  const Vec3 pc = c - d * pole;
  const double rb = pb.norm();
  if (rb < 1e-14) return slerp(b, c, tau);
  const Vec3 e1 = pb / rb;
  const Vec3 e2 = pole.cross(e1);
  const double phi = tau * std::atan2(pc.dot(e2), pc.dot(e1));
  return (d * pole + rb * (std::cos(phi) * e1 + std::sin(phi) * e2)).normalized();
}

}  // namespace

std::vector<Vec3> resample_spherical(std::span<const Vec3> pts) {
  const std::size_t n = pts.size();
  std::vector<double> h(n);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    h[i] = arc_angle(pts[i], pts[(i + 1) % n]);
    total += h[i];
  }
  // Blend of the circles through (i-1, i, i+1) and (i, i+1, i+2).
  std::vector<Vec3> out(n);
  out[0] = pts[0];
  std::size_t seg = 0;
  double seg_start = 0.0;
  for (std::size_t k = 1; k < n; ++k) {
    const double target = total * static_cast<double>(k) / static_cast<double>(n);
    while (seg + 1 < n && seg_start + h[seg] < target) {
      seg_start += h[seg];
      ++seg;
    }
    const double tau = std::clamp((target - seg_start) / h[seg], 0.0, 1.0);
    const Vec3& pm = pts[(seg + n - 1) % n];
    const Vec3& p0 = pts[seg];
    const Vec3& p1 = pts[(seg + 1) % n];
    const Vec3& p2 = pts[(seg + 2) % n];
    const Vec3 left = circle_interpolate(pm, p0, p1, tau);
    const Vec3 right = circle_interpolate(p2, p1, p0, 1.0 - tau);
    out[k] = ((1.0 - tau) * left + tau * right).normalized();
  }
  return out;
}

double extrapolated_length(std::span<const Vec3> pts) {
  const std::size_t n = pts.size();
  double full = 0.0;
  for (std::size_t i = 0; i < n; ++i) full += arc_angle(pts[i], pts[(i + 1) % n]);
  if (n < 8) return full;
  double half = 0.0;
  for (std::size_t i = 0; i < n; i += 2) half += arc_angle(pts[i], pts[(i + 2) % n]);
  if (n % 2 == 1) return full;
  return (4.0 * full - half) / 3.0;
}

namespace {

double min_spacing(std::span<const Vec3> pts) {
  double h = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i) h = std::min(h, arc_angle(pts[i], pts[(i + 1) % pts.size()]));
  return h;
}


struct Extremes {
  double lo;
  double hi;
};

Extremes extremes(const std::vector<double>& k) {
  const auto [lo, hi] = std::minmax_element(k.begin(), k.end());
  return {*lo, *hi};
}

// Normal move without redistribution, so that step-doubling compares the same
// Lagrangian samples.
std::vector<Vec3> move_normal(std::span<const Vec3> pts, double dt, const DtPolicy& policy) {
  const std::size_t n = pts.size();
  const auto kappa = geodesic_curvatures(pts);
  const auto [kmin, kmax] = extremes(kappa);
  if (!(kmin > policy.curvature_floor))
    throw CurvatureFloor("geodesic curvature " + std::to_string(kmin) + " at or below the floor");
  const auto nu = spherical_outward_normals(pts);

  std::vector<double> u(n);
  if (policy.scheme == TimeScheme::explicit_euler) {
    for (std::size_t i = 0; i < n; ++i) u[i] = dt / kappa[i];
  } else {
    std::vector<double> h(n);
    for (std::size_t i = 0; i < n; ++i) h[i] = arc_angle(pts[i], pts[(i + 1) % n]);
    std::vector<double> a(n), b(n), c(n), d(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double hm = h[(i + n - 1) % n];
      const double hp = h[i];
      const double coef = dt / (kappa[i] * kappa[i]) * 2.0 / (hm + hp);
      a[i] = -coef / hm;
      c[i] = -coef / hp;
      b[i] = 1.0 + coef * (1.0 / hm + 1.0 / hp);
      d[i] = dt / kappa[i];
    }
    u = detail::solve_cyclic_tridiagonal(a, b, c, d);
  }
  std::vector<Vec3> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = geodesic_move(pts[i], nu[i], u[i]);
  return out;
}

bool locally_convex(std::span<const Vec3> pts) {
  const auto k = geodesic_curvatures(pts);
  return std::all_of(k.begin(), k.end(), [](double v) { return v > 0.0; });
}

double stable_dt_cap(std::span<const Vec3> pts, const std::vector<double>& kappa, const DtPolicy& policy) {
  const double h = min_spacing(pts);
  const double kmin = *std::min_element(kappa.begin(), kappa.end());
  double cap = policy.safety * kmin * h;
  if (policy.scheme == TimeScheme::explicit_euler) cap = std::min(cap, policy.safety * kmin * kmin * h * h);
  return std::max(cap, policy.dt_min);
}

SphericalState to_state(std::vector<Vec3> pts, double t, std::size_t step, double tolerance) {
  SphericalState s;
  s.t = t;
  s.step_index = step;
  s.curvature = geodesic_curvatures(pts);
  s.geometry = geom::SphericalCurve(std::move(pts), {}, tolerance);
  return s;
}

Diagnostics diagnose(const SphericalState& s, double dt) {
  Diagnostics d;
  d.step = s.step_index;
  d.t = s.t;
  d.measure = geom::spherical_length(s.geometry);
  const auto [lo, hi] = extremes(s.curvature);
  d.kappa_min = lo;
  d.kappa_max = hi;
  d.set_monitor("length_extrapolated", extrapolated_length(s.geometry.points()));
  d.set_monitor("dt", dt);
  return d;
}

}  // namespace

SphericalState make_spherical_state(const geom::SphericalCurve& curve, double t) {
  std::vector<Vec3> pts(curve.points().begin(), curve.points().end());
  double turn = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const std::size_t n = pts.size();
    turn += (pts[i] - pts[(i + n - 1) % n]).cross(pts[(i + 1) % n] - pts[i]).dot(pts[i]);
  }
  if (turn < 0.0) std::reverse(pts.begin() + 1, pts.end());
  return to_state(std::move(pts), t, 0, curve.tolerance());
}

SphericalState step_spherical_imcf(const SphericalState& state, double dt, const DtPolicy& policy) {
  if (!(dt > 0.0)) throw DomainError("time step must be positive");
  auto moved = move_normal(state.geometry.points(), dt, policy);
  if (!locally_convex(moved)) throw StepRejected("convexity lost; halve the time step");
  auto pts = resample_spherical(moved);
  if (!locally_convex(pts)) pts = std::move(moved);
  return to_state(std::move(pts), state.t + dt, state.step_index + 1, state.geometry.tolerance());
}

SphericalTrace evolve_spherical(const geom::SphericalCurve& initial, const SphericalRunOptions& options) {
  if (!(options.snapshot_interval > 0.0)) throw DomainError("snapshot interval must be positive");
  if (!(options.t_end >= 0.0)) throw DomainError("end time must be nonnegative");
  const DtPolicy& policy = options.dt;
  const double tol_geom = initial.tolerance();

  SphericalTrace trace;
  SphericalState state = make_spherical_state(initial);
  std::vector<Vec3> pts(state.geometry.points().begin(), state.geometry.points().end());

  auto record_snapshot = [&](const SphericalState& s, double dt) {
    auto d = diagnose(s, dt);
    if (options.check_convexity) d.set_monitor("convexity_violation", geom::convexity_check(s.geometry).worst_violation);
    trace.states.push_back(s);
    trace.diagnostics.push_back(std::move(d));
  };
  record_snapshot(state, 0.0);
  trace.step_log.push_back(trace.diagnostics.back());
  if (options.observer) options.observer(state);

  const double L_stop = kTwoPi * (1.0 - options.delta_stop);
  if (extrapolated_length(pts) >= L_stop) {
    trace.stop_reason = "near_equator";
    return trace;
  }

  double t = 0.0;
  double dt_try = policy.dt_initial;
  std::size_t step = 0;
  std::size_t next_snap = 1;
  auto snap_time = [&](std::size_t k) { return std::min(options.t_end, options.snapshot_interval * static_cast<double>(k)); };
  trace.stop_reason = "t_end";

  while (t < options.t_end - 1e-14) {
    if (step >= policy.max_steps) {
      trace.stop_reason = "max_steps";
      break;
    }
    const double L_now = extrapolated_length(pts);
    if (L_now >= L_stop * (1.0 - 1e-13)) {
      trace.stop_reason = "near_equator";
      break;
    }
    const double dt_equator = std::log(L_stop / L_now);
    if (dt_equator < 1e-12) {
      trace.stop_reason = "near_equator";
      break;
    }
    const auto kappa = geodesic_curvatures(pts);
    const double target = snap_time(next_snap);
    double dt = std::min({dt_try, policy.dt_max, stable_dt_cap(pts, kappa, policy), target - t, dt_equator});
    bool hits_target = dt >= target - t - 1e-14;

    std::vector<Vec3> next;
    double err = 0.0;
    for (;;) {
      auto full = move_normal(pts, dt, policy);
      auto half = move_normal(pts, 0.5 * dt, policy);
      auto twice = move_normal(half, 0.5 * dt, policy);
      err = 0.0;
      for (std::size_t i = 0; i < pts.size(); ++i) err = std::max(err, (full[i] - twice[i]).norm());
      if (policy.adaptive && err > policy.error_tol && dt > policy.dt_min) {
        dt = std::max(policy.dt_min, dt * std::max(0.2, 0.9 * std::sqrt(policy.error_tol / err)));
        hits_target = false;
        continue;
      }
      next.resize(pts.size());
      for (std::size_t i = 0; i < pts.size(); ++i) next[i] = (2.0 * twice[i] - full[i]).normalized();
      if (!locally_convex(next)) {
        if (dt <= policy.dt_min) throw StepRejected("convexity lost at the minimum time step");
        dt = std::max(policy.dt_min, 0.5 * dt);
        hits_target = false;
        continue;
      }
      break;
    }
    // Interpolation across a curvature jump can dent a nearly geodesic side;
    // such steps keep the Lagrangian samples.
    auto redistributed = resample_spherical(next);
    const bool keep = locally_convex(redistributed);
    pts = keep ? std::move(redistributed) : std::move(next);
    t = hits_target ? target : t + dt;
    ++step;
    if (policy.adaptive) {
      const double grow = err > 0.0 ? 0.9 * std::sqrt(policy.error_tol / err) : 2.0;
      dt_try = dt * std::clamp(grow, 0.2, 2.0);
    } else {
      dt_try = policy.dt_initial;
    }

    state = to_state(pts, t, step, tol_geom);
    trace.step_log.push_back(diagnose(state, dt));
    if (options.observer) options.observer(state);
    trace.step_log.back().set_monitor("redistributed", keep ? 1.0 : 0.0);
    if (hits_target) {
      record_snapshot(state, dt);
      ++next_snap;
    }
  }
  if (trace.states.back().t < t) record_snapshot(state, 0.0);
  return trace;
}

double great_circle_residual(std::span<const Vec3> pts) {
  Mat3 scatter = Mat3::Zero();
  for (const auto& x : pts) scatter += x * x.transpose();
  Eigen::SelfAdjointEigenSolver<Mat3> es(scatter);
  const Vec3 n = es.eigenvectors().col(0);
  double r = 0.0;
  for (const auto& x : pts) r = std::max(r, std::abs(std::asin(std::clamp(n.dot(x), -1.0, 1.0))));
  return r;
}

EquatorReport equator_convergence_time(const SphericalTrace& trace) {
  if (trace.empty()) throw InsufficientData("empty trace");
  auto length_of = [&](std::size_t k) {
    const double ext = trace.diagnostics[k].monitor("length_extrapolated");
    return std::isnan(ext) ? trace.diagnostics[k].measure : ext;
  };
  EquatorReport out;
  out.final_residual = great_circle_residual(trace.states.back().geometry.points());
  if (trace.size() < 2) {
    if (std::abs(length_of(0) - kTwoPi) > 1e-6 * kTwoPi)
      throw InsufficientData("trace too short to fit the length law");
    out.T_observed = trace.states[0].t;
    out.samples_used = 1;
    return out;
  }
  double mean = 0.0;
  for (std::size_t k = 0; k < trace.size(); ++k) mean += std::log(length_of(k)) - trace.states[k].t;
  mean /= static_cast<double>(trace.size());
  out.T_observed = std::log(kTwoPi) - mean;
  out.samples_used = trace.size();
  return out;
}

}  // namespace imcf::flows
