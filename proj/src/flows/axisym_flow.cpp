#include "imcf/flows/axisym_flow.hpp"

#include "imcf/detail/tridiag.hpp"
#include "imcf/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace imcf::flows {

using geom::AxisymProfile;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool is_tip(std::optional<std::size_t> tip, std::size_t i) { return tip && *tip == i; }

Vec2 mirror(const Vec2& p) { return Vec2(-p.x(), p.y()); }

Vec2 outward(const Vec2& tangent) {
  const Vec2 t = tangent.normalized();
  return Vec2(t.y(), -t.x());
}

}  // namespace

ProfileCurvature profile_curvature(std::span<const Vec2> pts, bool closed, std::optional<std::size_t> tip) {
  const std::size_t n = pts.size();
  if (n < 3) throw MalformedInput("profile curvature needs at least 3 samples");
  ProfileCurvature c;
  c.k1.assign(n, 0.0);
  c.k2.assign(n, 0.0);
  c.H.assign(n, 0.0);
  c.normals.assign(n, Vec2::Zero());
  for (std::size_t i = 1; i + 1 < n; ++i) {
    c.k1[i] = three_point_curvature(pts[i - 1], pts[i], pts[i + 1]);
    c.normals[i] = outward(pts[i + 1] - pts[i - 1]);
    c.k2[i] = c.normals[i].x() / pts[i].x();
  }
  for (std::size_t e : {std::size_t{0}, n - 1}) {
    const bool first = e == 0;
    const std::size_t nb = first ? 1 : n - 2;
    if (is_tip(tip, e)) {
      c.k1[e] = c.k2[e] = kInf;
      c.normals[e] = Vec2(0.0, first ? -1.0 : 1.0);
      continue;
    }
    if (closed) {
      const Vec2 g = mirror(pts[nb]);
      c.k1[e] = first ? three_point_curvature(g, pts[0], pts[1]) : three_point_curvature(pts[n - 2], pts[n - 1], g);
      c.k2[e] = c.k1[e];
      c.normals[e] = Vec2(0.0, first ? -1.0 : 1.0);
    } else {
      c.k1[e] = c.k1[nb];
      c.normals[e] = outward(first ? pts[1] - pts[0] : pts[n - 1] - pts[n - 2]);
      c.k2[e] = c.normals[e].x() / pts[e].x();
    }
  }
  for (std::size_t i = 0; i < n; ++i) c.H[i] = c.k1[i] + c.k2[i];
  return c;
}

ProfileCurvature profile_curvature(const AxisymProfile& profile) {
  return profile_curvature(profile.samples(), profile.closed(), profile.tip_index());
}

namespace {

double sinc(double y) { return std::abs(y) < 1e-6 ? 1.0 - y * y / 6.0 : std::sin(y) / y; }
double asin_over(double x) { return std::abs(x) < 1e-6 ? 1.0 + x * x / 6.0 : std::asin(x) / x; }

// Point at fraction tau of the arc from b to c on the circle through a, b, c.
Vec2 circle_interpolate(const Vec2& a, const Vec2& b, const Vec2& c, double tau) {
  const double kappa = three_point_curvature(a, b, c);
  const Vec2 v = c - b;
  const double len = v.norm();
  if (len == 0.0) return b;
  const double x = std::clamp(0.5 * kappa * len, -1.0, 1.0);
  const double theta = 2.0 * std::asin(x);
  const double phi = tau * theta;
  const double chord = tau * len * asin_over(x) * sinc(0.5 * phi);
  const double rot = 0.5 * (phi - theta);
  const Vec2 e = v / len;
  const double cs = std::cos(rot), sn = std::sin(rot);
  return b + chord * Vec2(cs * e.x() - sn * e.y(), sn * e.x() + cs * e.y());
}

}  // namespace

std::vector<Vec2> resample_profile(std::span<const Vec2> pts, bool closed, std::optional<std::size_t> tip) {
  const std::size_t n = pts.size();
  std::vector<double> h(n - 1);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = (pts[i + 1] - pts[i]).norm();
    total += h[i];
  }
  auto ghost = [&](bool first) {
    const std::size_t e = first ? 0 : n - 1;
    const std::size_t nb = first ? 1 : n - 2;
    if (closed && !is_tip(tip, e)) return mirror(pts[nb]);
    return Vec2(2.0 * pts[e] - pts[nb]);
  };
  const Vec2 g0 = ghost(true);
  const Vec2 g1 = ghost(false);
  auto at = [&](std::ptrdiff_t i) -> Vec2 {
    if (i < 0) return g0;
    if (i >= static_cast<std::ptrdiff_t>(n)) return g1;
    return pts[static_cast<std::size_t>(i)];
  };
  std::vector<Vec2> out(n);
  out.front() = pts.front();
  out.back() = pts.back();
  std::size_t seg = 0;
  double seg_start = 0.0;
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const double target = total * static_cast<double>(k) / static_cast<double>(n - 1);
    while (seg + 2 < n && seg_start + h[seg] < target) {
      seg_start += h[seg];
      ++seg;
    }
    const double tau = std::clamp((target - seg_start) / h[seg], 0.0, 1.0);
    const auto s = static_cast<std::ptrdiff_t>(seg);
    const Vec2 left = circle_interpolate(at(s - 1), at(s), at(s + 1), tau);
    const Vec2 right = circle_interpolate(at(s + 2), at(s + 1), at(s), 1.0 - tau);
    out[k] = (1.0 - tau) * left + tau * right;
  }
  return out;
}

ProfileState make_profile_state(const AxisymProfile& profile, double t) {
  ProfileState s;
  s.t = t;
  s.geometry = profile;
  s.curvature = profile_curvature(profile).H;
  return s;
}

namespace {

double finite_min(const std::vector<double>& v) {
  double m = kInf;
  for (double x : v)
    if (std::isfinite(x)) m = std::min(m, x);
  return m;
}

std::vector<Vec2> move_normal(std::span<const Vec2> pts, bool closed, std::optional<std::size_t> tip, double dt,
                              const DtPolicy& policy) {
  const std::size_t n = pts.size();
  const auto c = profile_curvature(pts, closed, tip);
  const double hmin = finite_min(c.H);
  if (!(hmin > policy.curvature_floor)) {
    const auto at = std::find(c.H.begin(), c.H.end(), hmin) - c.H.begin();
    throw CurvatureFloor("mean curvature " + std::to_string(hmin) + " at or below the floor at sample " +
                         std::to_string(at));
  }

  std::vector<double> u(n, 0.0);
  if (policy.scheme == TimeScheme::explicit_euler) {
    for (std::size_t i = 0; i < n; ++i) u[i] = is_tip(tip, i) ? 0.0 : dt / c.H[i];
  } else {
    std::vector<double> h(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) h[i] = (pts[i + 1] - pts[i]).norm();
    std::vector<double> a(n, 0.0), b(n, 1.0), cc(n, 0.0), d(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      if (is_tip(tip, i)) continue;
      const double w = dt / (c.H[i] * c.H[i]);
      d[i] = dt / c.H[i];
      if (i == 0 || i + 1 == n) {
        if (!closed) continue;
        const double hh = i == 0 ? h[0] : h[n - 2];
        const double coef = 4.0 * w / (hh * hh);
        b[i] = 1.0 + coef;
        if (i == 0) cc[i] = -coef;
        else a[i] = -coef;
        continue;
      }
      const double hm = h[i - 1], hp = h[i];
      const double rm = 0.5 * (pts[i - 1].x() + pts[i].x());
      const double rp = 0.5 * (pts[i].x() + pts[i + 1].x());
      const double scale = 2.0 * w / (pts[i].x() * (hm + hp));
      a[i] = -scale * rm / hm;
      cc[i] = -scale * rp / hp;
      b[i] = 1.0 + scale * (rm / hm + rp / hp);
    }
    u = detail::solve_tridiagonal(a, b, cc, d);
  }
  std::vector<Vec2> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = pts[i] + u[i] * c.normals[i];
  if (closed) {
    out.front().x() = 0.0;
    out.back().x() = 0.0;
  }
  for (std::size_t i = 0; i < n; ++i)
    if (out[i].x() < 0.0) throw StepRejected("sample " + std::to_string(i) + " crossed the axis; halve the time step");
  return out;
}

double stable_dt_cap(std::span<const Vec2> pts, const ProfileCurvature& c, const DtPolicy& policy) {
  double h = kInf;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) h = std::min(h, (pts[i + 1] - pts[i]).norm());
  const double hmin = finite_min(c.H);
  double cap = policy.safety * hmin * h;
  if (policy.scheme == TimeScheme::explicit_euler) cap = std::min(cap, policy.safety * hmin * hmin * h * h);
  return std::max(cap, policy.dt_min);
}

ProfileState to_state(std::vector<Vec2> pts, const AxisymProfile& like, std::optional<std::size_t> tip, double t,
                      std::size_t step) {
  ProfileState s;
  s.t = t;
  s.step_index = step;
  s.geometry = AxisymProfile(std::move(pts), like.closed(), tip, like.tolerance());
  s.curvature = profile_curvature(s.geometry).H;
  return s;
}

Diagnostics diagnose(const ProfileState& s, double dt) {
  Diagnostics d;
  d.step = s.step_index;
  d.t = s.t;
  d.measure = s.geometry.surface_area();
  double lo = kInf, hi = -kInf;
  for (double v : s.curvature)
    if (std::isfinite(v)) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  d.kappa_min = lo;
  d.kappa_max = hi;
  const auto& g = s.geometry;
  const std::size_t ti = g.tip_index().value_or(0);
  if (g.closed() || g.tip_index()) {
    d.tip_r = g[ti].x();
    d.tip_z = g[ti].y();
  }
  d.set_monitor("dt", dt);
  return d;
}

}  // namespace

ProfileState step_axisym_imcf(const ProfileState& state, double dt, const DtPolicy& policy) {
  if (!(dt > 0.0)) throw DomainError("time step must be positive");
  const auto& g = state.geometry;
  auto moved = move_normal(g.samples(), g.closed(), g.tip_index(), dt, policy);
  auto pts = resample_profile(moved, g.closed(), g.tip_index());
  return to_state(std::move(pts), g, g.tip_index(), state.t + dt, state.step_index + 1);
}

double tip_cone_angle(const AxisymProfile& profile, double window) {
  const auto tip = profile.tip_index();
  if (!tip) throw DomainError("profile has no marked tip");
  if (!(window > 0.0)) throw DomainError("tip window must be positive");
  const Vec2 p0 = profile[*tip];
  const std::size_t n = profile.size();
  double srz = 0.0, srr = 0.0;
  std::size_t used = 0;
  for (std::size_t k = 1; k < n; ++k) {
    const std::size_t i = *tip == 0 ? k : n - 1 - k;
    const Vec2 d = profile[i] - p0;
    if (d.norm() > window) break;
    srz += d.x() * d.y();
    srr += d.x() * d.x();
    ++used;
  }
  if (used < 2 || srr <= 0.0) throw InsufficientData("fewer than two samples inside the tip window");
  const double slope = srz / srr;
  return std::atan(*tip == 0 ? slope : -slope);
}

AxisymProfile smooth_tip(const AxisymProfile& profile, double window) {
  const auto tip = profile.tip_index();
  if (!tip) return profile;
  const std::size_t n = profile.size();
  const Vec2 p0 = profile[*tip];
  std::vector<std::size_t> idx;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = *tip == 0 ? k : n - 1 - k;
    if ((profile[i] - p0).norm() > window) break;
    idx.push_back(i);
  }
  if (idx.size() < 3 || idx.back() == 0 || idx.back() + 1 >= n)
    throw InsufficientData("tip window must hold at least three samples and end inside the profile");
  // Height above the tip h(r) = Z (r / r_e)^(p+1), matching height Z and slope
  // S at the window edge r_e: p = S r_e / Z - 1.
  const double sigma = *tip == 0 ? 1.0 : -1.0;
  const std::size_t e = idx.back();
  const Vec2& before = profile[e - 1];
  const Vec2& after = profile[e + 1];
  const double re = profile[e].x();
  const double Z = sigma * (profile[e].y() - p0.y());
  const double S = sigma * (after.y() - before.y()) / (after.x() - before.x());
  if (!(re > 0.0 && Z > 0.0)) throw DomainError("tip neighbourhood is not convex");
  const double p = std::max(S * re / Z - 1.0, 0.05);
  std::vector<Vec2> pts(profile.samples().begin(), profile.samples().end());
  for (std::size_t i : idx) {
    if (i == *tip) continue;
    pts[i].y() = p0.y() + sigma * Z * std::pow(pts[i].x() / re, p + 1.0);
  }
  return AxisymProfile(std::move(pts), profile.closed(), std::nullopt, profile.tolerance());
}

std::string to_string(TipRelease r) {
  switch (r) {
    case TipRelease::predicted:
      return "predicted";
    case TipRelease::angle_trigger:
      return "angle_trigger";
    case TipRelease::never:
      return "never";
  }
  return "unknown";
}

TipRelease tip_release_from_string(const std::string& s) {
  if (s == "predicted") return TipRelease::predicted;
  if (s == "angle_trigger") return TipRelease::angle_trigger;
  if (s == "never") return TipRelease::never;
  throw UsageError("unknown tip release '" + s + "' (expected predicted, angle_trigger or never)");
}

ProfileTrace evolve_axisym(const AxisymProfile& initial, const AxisymRunOptions& options) {
  if (!(options.snapshot_interval > 0.0)) throw DomainError("snapshot interval must be positive");
  if (!(options.t_end >= 0.0)) throw DomainError("end time must be nonnegative");
  const DtPolicy& policy = options.dt;

  ProfileTrace trace;
  trace.had_tip = initial.tip_index().has_value();
  AxisymProfile geom = initial;
  std::optional<double> release_at;
  if (trace.had_tip && options.release == TipRelease::predicted) {
    release_at = options.release_time ? *options.release_time
                                      : -std::log(std::cos(tip_cone_angle(initial, options.tip_window)));
  }

  ProfileState state = make_profile_state(geom);
  auto record_snapshot = [&](const ProfileState& s, double dt) {
    auto d = diagnose(s, dt);
    if (s.geometry.tip_index()) {
      try {
        d.set_monitor("tip_angle", tip_cone_angle(s.geometry, options.tip_window));
      } catch (const InsufficientData&) {
      }
    }
    trace.states.push_back(s);
    trace.diagnostics.push_back(std::move(d));
  };
  record_snapshot(state, 0.0);
  trace.step_log.push_back(trace.diagnostics.back());
  if (options.observer) options.observer(state);
  trace.stop_reason = "t_end";

  auto release = [&](double t) {
    geom = smooth_tip(geom, options.smooth_window);
    trace.tip_release_time = t;
  };

  double t = 0.0;
  double dt_try = policy.dt_initial;
  std::size_t step = 0;
  std::size_t next_snap = 1;
  auto snap_time = [&](std::size_t k) {
    return std::min(options.t_end, options.snapshot_interval * static_cast<double>(k));
  };
  while (t < options.t_end - 1e-14) {
    if (step >= policy.max_steps) {
      trace.stop_reason = "max_steps";
      break;
    }
    if (geom.tip_index()) {
      bool go = false;
      if (release_at && t >= *release_at - 1e-14) go = true;
      if (options.release == TipRelease::angle_trigger) {
        try {
          go = tip_cone_angle(geom, options.tip_window) <= options.release_angle;
        } catch (const InsufficientData&) {
        }
      }
      if (go) release(t);
    }
    const auto pts = std::vector<Vec2>(geom.samples().begin(), geom.samples().end());
    const auto tip = geom.tip_index();
    const auto curv = profile_curvature(pts, geom.closed(), tip);
    double target = snap_time(next_snap);
    if (release_at && geom.tip_index() && *release_at > t && *release_at < target) target = *release_at;
    double dt = std::min({dt_try, policy.dt_max, stable_dt_cap(pts, curv, policy), target - t});
    bool hits_target = dt >= target - t - 1e-14;

    std::vector<Vec2> next;
    double err = 0.0;
    for (;;) {
      try {
        auto full = move_normal(pts, geom.closed(), tip, dt, policy);
        auto half = move_normal(pts, geom.closed(), tip, 0.5 * dt, policy);
        auto twice = move_normal(half, geom.closed(), tip, 0.5 * dt, policy);
        err = 0.0;
        for (std::size_t i = 0; i < pts.size(); ++i) err = std::max(err, (full[i] - twice[i]).norm());
        if (policy.adaptive && err > policy.error_tol && dt > policy.dt_min) {
          dt = std::max(policy.dt_min, dt * std::max(0.2, 0.9 * std::sqrt(policy.error_tol / err)));
          hits_target = false;
          continue;
        }
        next.resize(pts.size());
        for (std::size_t i = 0; i < pts.size(); ++i) next[i] = 2.0 * twice[i] - full[i];
        if (geom.closed()) {
          next.front().x() = 0.0;
          next.back().x() = 0.0;
        }
        if (std::any_of(next.begin(), next.end(), [](const Vec2& p) { return p.x() < 0.0; }))
          throw StepRejected("sample crossed the axis");
        const auto c = profile_curvature(next, geom.closed(), tip);
        if (!(finite_min(c.H) > 0.0)) throw StepRejected("mean curvature lost positivity");
      } catch (const StepRejected&) {
        if (dt <= policy.dt_min) throw;
        dt = std::max(policy.dt_min, 0.5 * dt);
        hits_target = false;
        continue;
      }
      break;
    }
    auto redistributed = resample_profile(next, geom.closed(), tip);
    t = hits_target ? target : t + dt;
    ++step;
    if (policy.adaptive) {
      const double grow = err > 0.0 ? 0.9 * std::sqrt(policy.error_tol / err) : 2.0;
      dt_try = dt * std::clamp(grow, 0.2, 2.0);
    } else {
      dt_try = policy.dt_initial;
    }
    geom = AxisymProfile(std::move(redistributed), geom.closed(), tip, geom.tolerance());
    state = make_profile_state(geom, t);
    state.step_index = step;
    trace.step_log.push_back(diagnose(state, dt));
    if (options.observer) options.observer(state);
    if (hits_target && std::abs(t - snap_time(next_snap)) < 1e-14) {
      record_snapshot(state, dt);
      ++next_snap;
    }
  }
  if (trace.states.back().t < t) record_snapshot(state, 0.0);
  return trace;
}

}  // namespace imcf::flows
