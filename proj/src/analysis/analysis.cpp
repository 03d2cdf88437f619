#include "imcf/analysis/analysis.hpp"

#include "imcf/detail/extrapolate.hpp"
#include "imcf/error.hpp"
#include "imcf/flows/axisym_flow.hpp"
#include "imcf/flows/exact.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>

namespace imcf::analysis {

using geom::AxisymProfile;
using geom::ConvexPolytope;
using geom::SphericalCurve;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double angle_between(const Vec3& u, const Vec3& v) { return std::atan2(u.cross(v).norm(), u.dot(v)); }

double segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double l2 = ab.squaredNorm();
  const double tau = l2 > 0.0 ? std::clamp((p - a).dot(ab) / l2, 0.0, 1.0) : 0.0;
  return (p - (a + tau * ab)).norm();
}

double arc_distance(const Vec3& p, const Vec3& a, const Vec3& b) {
  const Vec3 c = a.cross(b);
  const double endpoints = std::min(angle_between(p, a), angle_between(p, b));
  if (c.norm() < 1e-14) return endpoints;
  const Vec3 n = c.normalized();
  const Vec3 q = p - p.dot(n) * n;
  if (q.norm() < 1e-14) return endpoints;
  const Vec3 qn = q.normalized();
  if (a.cross(qn).dot(n) >= 0.0 && qn.cross(b).dot(n) >= 0.0) return std::asin(std::min(1.0, std::abs(p.dot(n))));
  return endpoints;
}

double distance_to_profile(const AxisymProfile& g, const Vec2& p) {
  double d = kInf;
  for (std::size_t i = 0; i + 1 < g.size(); ++i) d = std::min(d, segment_distance(p, g[i], g[i + 1]));
  return d;
}

double distance_to_curve(const SphericalCurve& c, const Vec3& p) {
  double d = kInf;
  for (std::size_t i = 0; i < c.size(); ++i) d = std::min(d, arc_distance(p, c[i], c.wrap(static_cast<std::ptrdiff_t>(i) + 1)));
  return d;
}

double signed_distance(const SphericalCurve& c, const Vec3& p) {
  double side = kInf;
  for (std::size_t i = 0; i < c.size(); ++i)
    side = std::min(side, c[i].cross(c.wrap(static_cast<std::ptrdiff_t>(i) + 1)).dot(p));
  const double d = distance_to_curve(c, p);
  return side >= 0.0 ? d : -d;
}

WaitingTimeReport crossing(const std::vector<double>& t, const std::vector<double>& d, double tol, double base) {
  WaitingTimeReport rep;
  rep.tolerance = tol;
  if (t.empty()) throw InsufficientData("waiting time needs a nonempty trace");
  for (std::size_t k = 0; k < t.size(); ++k) rep.displacement.emplace_back(t[k], d[k] - base);
  for (std::size_t k = 1; k < t.size(); ++k) {
    const double dk = d[k] - base;
    if (dk <= tol) continue;
    const double dp = d[k - 1] - base;
    const double dt = t[k] - t[k - 1];
    const double slope = (dk - dp) / dt;
    rep.t_wait = t[k - 1] + (tol - dp) / slope;
    rep.t_onset = std::max(0.0, t[k - 1] - dp / slope);
    return rep;
  }
  rep.censored = true;
  rep.t_wait = t.back();
  return rep;
}

double log_measure_bound(const geom::ExtrinsicMeasures& m) { return 2.0 * (std::log(m.diameter) - std::log(m.inradius)); }

Vec3 lift(const Vec2& q) { return {q.x(), 0.0, q.y()}; }

}  // namespace

WaitingTimeReport waiting_time(const flows::ProfileTrace& trace, const Vec2& p, double displacement_tol) {
  if (trace.empty()) throw InsufficientData("waiting time needs a nonempty trace");
  const auto& g0 = trace.states.front().geometry;
  const double tol = displacement_tol >= 0.0 ? displacement_tol : 3.0 * g0.length() / static_cast<double>(g0.size() - 1);
  std::vector<double> t, d;
  for (const auto& s : trace.states) {
    t.push_back(s.t);
    d.push_back(distance_to_profile(s.geometry, p));
  }
  return crossing(t, d, tol, d.front());
}

WaitingTimeReport waiting_time(const flows::SphericalTrace& trace, const Vec3& p, double displacement_tol) {
  if (trace.empty()) throw InsufficientData("waiting time needs a nonempty trace");
  const auto& g0 = trace.states.front().geometry;
  const double tol =
      displacement_tol >= 0.0 ? displacement_tol : 3.0 * geom::spherical_length(g0) / static_cast<double>(g0.size());
  const Vec3 q = p.normalized();
  std::vector<double> t, d;
  for (const auto& s : trace.states) {
    t.push_back(s.t);
    d.push_back(signed_distance(s.geometry, q));
  }
  return crossing(t, d, tol, std::max(d.front(), 0.0));
}

WaitingTimeReport waiting_time(const flows::WeakFlowResult& flow, const Vec3& p, double displacement_tol) {
  const std::size_t m = flow.members.size();
  if (m < 2) throw InsufficientData("corner extrapolation needs two members");
  const auto& fine = flow.members[m - 1];
  const auto& coarse = flow.members[m - 2];
  if (!fine.epsilon || !coarse.epsilon) throw InsufficientData("members carry no ε");
  if (fine.empty()) throw InsufficientData("waiting time needs a nonempty trace");
  const auto& g0 = fine.states.front().geometry;
  const double tol =
      displacement_tol >= 0.0 ? displacement_tol : 3.0 * geom::spherical_length(g0) / static_cast<double>(g0.size());
  const Vec3 q = p.normalized();
  const double eps[2] = {*coarse.epsilon, *fine.epsilon};
  std::vector<double> t, d;
  for (std::size_t k = 0; k < std::min(fine.size(), coarse.size()); ++k) {
    if (std::abs(fine.states[k].t - coarse.states[k].t) > 1e-12) break;
    const double ys[2] = {signed_distance(coarse.states[k].geometry, q), signed_distance(fine.states[k].geometry, q)};
    t.push_back(fine.states[k].t);
    d.push_back(detail::neville_at_zero(eps, ys));
  }
  return crossing(t, d, tol, std::max(d.front(), 0.0));
}

TimeScales smoothing_time(const ConvexPolytope& body) {
  TimeScales ts;
  double worst_len = kInf;
  for (std::size_t v = 0; v < body.vertices().size(); ++v) {
    const auto link = geom::vertex_link(body, v);
    const double rho = geom::density_from_link(link).value;
    const double w = -std::log(rho);
    if (w > ts.T_smooth) {
      ts.T_smooth = w;
      ts.worst_point = body.vertices()[v];
    }
    if (link.curve) worst_len = std::min(worst_len, geom::link_length(link));
  }
  ts.T_gamma = std::isfinite(worst_len) ? flows::equator_time(worst_len) : 0.0;
  ts.T_bound = log_measure_bound(geom::extrinsic_measures(body));
  return ts;
}

TimeScales smoothing_time(const AxisymProfile& body, double tip_window) {
  TimeScales ts;
  ts.T_gamma = 0.0;
  if (const auto tip = body.tip_index()) {
    const double theta = flows::tip_cone_angle(body, tip_window);
    ts.T_smooth = -std::log(std::cos(theta));
    ts.T_gamma = ts.T_smooth;
    ts.worst_point = lift(body[*tip]);
  }
  if (body.closed()) ts.T_bound = log_measure_bound(geom::extrinsic_measures(body));
  return ts;
}

TimeScales smoothing_time(const flows::ConeSurface& cone) {
  TimeScales ts;
  const double len = cone.link.exact_length().value_or(geom::spherical_length(cone.link));
  ts.T_smooth = std::max(0.0, -std::log(len / kTwoPi));
  ts.T_gamma = flows::equator_time(len);
  ts.T_star = maximal_time(LinkRegion{cone.link, std::nullopt});
  return ts;
}

double maximal_time(const LinkRegion& region) {
  double P = 0.0;
  if (region.curve)
    P = region.curve->exact_length().value_or(geom::spherical_length(*region.curve));
  else if (region.arc)
    P = 2.0 * angle_between(region.arc->first.normalized(), region.arc->second.normalized());
  else
    throw InvalidRegion("link region needs a curve or an arc");
  if (!(P > 0.0)) throw InvalidRegion("link region has zero perimeter");
  if (P > kTwoPi * (1.0 + 1e-12))
    throw InvalidRegion("perimeter " + std::to_string(P) + " exceeds the length of a great circle");
  return std::max(0.0, std::log(kTwoPi) - std::log(P));
}

SmoothingBoundReport smoothing_bound_check(const ConvexPolytope& body) {
  const auto ts = smoothing_time(body);
  return {ts.T_smooth, ts.T_bound, ts.T_smooth < ts.T_bound};
}

SmoothingBoundReport smoothing_bound_check(const AxisymProfile& body) {
  if (!body.closed()) throw DomainError("smoothing bound needs a compact body");
  const auto ts = smoothing_time(body);
  return {ts.T_smooth, ts.T_bound, ts.T_smooth < ts.T_bound};
}

ConeAngleSeries cone_angle_series(const flows::ProfileTrace& trace, double fit_window, double t_from, double t_to) {
  ConeAngleSeries out;
  if (trace.empty() || !trace.states.front().geometry.tip_index()) {
    out.defined = false;
    out.truncated_at = trace.empty() ? 0.0 : trace.states.front().t;
    return out;
  }
  for (const auto& s : trace.states) {
    if (!s.geometry.tip_index()) {
      out.truncated_at = trace.tip_release_time.value_or(s.t);
      break;
    }
    const double th = flows::tip_cone_angle(s.geometry, fit_window);
    if (out.t.empty()) out.theta0 = th;
    double ex = kNaN;
    try {
      ex = flows::round_cone_exact(out.theta0, s.t);
    } catch (const FlatCone&) {
      out.truncated_at = s.t;
      break;
    }
    out.t.push_back(s.t);
    out.theta_fit.push_back(th);
    out.theta_exact.push_back(ex);
    if (s.t >= t_from && s.t <= t_to) out.max_deviation = std::max(out.max_deviation, std::abs(th - ex));
  }
  return out;
}

MannKendall mann_kendall(const std::vector<double>& x, double tie_tol) {
  MannKendall mk;
  const std::size_t n = x.size();
  if (n < 3) return mk;
  double scale = 0.0;
  for (double v : x) scale = std::max(scale, std::abs(v));
  const double tol = tie_tol * scale;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = x[j] - x[i];
      mk.S += d > tol ? 1.0 : (d < -tol ? -1.0 : 0.0);
    }
  std::vector<double> sorted = x;
  std::sort(sorted.begin(), sorted.end());
  const double nn = static_cast<double>(n);
  double var = nn * (nn - 1.0) * (2.0 * nn + 5.0);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i + 1;
    while (j < n && sorted[j] - sorted[j - 1] <= tol) ++j;
    const double g = static_cast<double>(j - i);
    var -= g * (g - 1.0) * (2.0 * g + 5.0);
    i = j;
  }
  var /= 18.0;
  if (var <= 0.0) return mk;
  const double sd = std::sqrt(var);
  mk.Z = mk.S > 0.0 ? (mk.S - 1.0) / sd : (mk.S < 0.0 ? (mk.S + 1.0) / sd : 0.0);
  mk.upward_trend = mk.Z > 1.6449;
  return mk;
}

namespace {

struct MonitorAccumulator {
  const MonitorParams& params;
  CdMonitorReport rep;
  double ratio = 0.0;

  void sample(double ratio_i, double cos_to_axis, double t) {
    const double m = cos_to_axis - std::sin(params.theta1);
    rep.star_margin = std::min(rep.star_margin, m);
    if (params.enforce_star_shape && m < -1e-12)
      throw PreconditionViolation("star-shape condition fails at t = " + std::to_string(t) + " by " +
                                  std::to_string(-m));
    if (std::isfinite(ratio_i)) ratio = std::max(ratio, ratio_i);
  }
  void close(double t) {
    rep.t.push_back(t);
    rep.sup_ratio.push_back(ratio);
    const double norm = ratio / (1.0 + 1.0 / std::sqrt(t));
    rep.normalized.push_back(norm);
    rep.fit_C = std::max(rep.fit_C, norm);
    ratio = 0.0;
  }
  CdMonitorReport finish() {
    if (rep.t.size() < 3) throw InsufficientData("monitor needs at least three snapshots with t > 0");
    rep.trend = mann_kendall(rep.sup_ratio);
    bool finite = true;
    for (double v : rep.sup_ratio) finite = finite && std::isfinite(v) && v > 0.0;
    rep.bounded = finite && !rep.trend.upward_trend && (params.fit_C <= 0.0 || rep.fit_C <= params.fit_C);
    return rep;
  }
};

}  // namespace

CdMonitorReport cd_monitor(const flows::ProfileTrace& trace, const MonitorParams& params, double t_from, double t_to) {
  MonitorAccumulator acc{params, {}};
  acc.rep.star_margin = kInf;
  const Vec3 w = params.omega.normalized();
  const double w_perp = std::hypot(w.x(), w.y());
  for (const auto& s : trace.states) {
    if (!(s.t > 0.0) || s.t < t_from || s.t > t_to) continue;
    const auto pc = flows::profile_curvature(s.geometry);
    for (std::size_t i = 0; i < s.geometry.size(); ++i) {
      const Vec2& q = s.geometry[i];
      const double F = q.norm();
      if (F < 1e-12) continue;
      // Worst rotation of the sample about the axis.
      const double fw = q.y() * w.z() - q.x() * w_perp;
      acc.sample(1.0 / (pc.H[i] * F), fw / F, s.t);
    }
    acc.close(s.t);
  }
  return acc.finish();
}

CdMonitorReport cd_monitor(const flows::ConeTrace& trace, const MonitorParams& params, double t_from, double t_to) {
  MonitorAccumulator acc{params, {}};
  acc.rep.star_margin = kInf;
  const Vec3 w = params.omega.normalized();
  for (const auto& s : trace.states) {
    if (!(s.t > 0.0) || s.t < t_from || s.t > t_to) continue;
    const auto& link = s.geometry.link;
    // H |F| = κ_g on every ray of the cone.
    for (std::size_t i = 0; i < link.size(); ++i) acc.sample(1.0 / s.geometry.link_curvature[i], link[i].dot(w), s.t);
    acc.close(s.t);
  }
  return acc.finish();
}

namespace {

// Profile samples and curvatures extended across the axis by reflection.
struct ReflectedProfile {
  std::span<const Vec2> p;
  bool closed;
  std::size_t m;
  flows::ProfileCurvature c;

  ReflectedProfile(const AxisymProfile& g, std::size_t stride)
      : p(g.samples()), closed(g.closed()), m(stride), c(flows::profile_curvature(g)) {}

  std::ptrdiff_t last() const { return static_cast<std::ptrdiff_t>(p.size()) - 1; }
  std::size_t index(std::ptrdiff_t j) const {
    if (j < 0) return static_cast<std::size_t>(-j);
    if (j > last()) return static_cast<std::size_t>(2 * last() - j);
    return static_cast<std::size_t>(j);
  }
  Vec2 at(std::ptrdiff_t j) const {
    const Vec2& q = p[index(j)];
    return j < 0 || j > last() ? Vec2(-q.x(), q.y()) : q;
  }
  double H_at(std::ptrdiff_t j) const { return c.H[index(j)]; }
  bool usable(std::size_t i) const { return closed || (i >= m && i + m < p.size()); }
};

}  // namespace

HResidualSeries h_evolution_residual(const flows::ProfileTrace& trace, std::size_t stride) {
  if (trace.had_tip) throw DomainError("residual needs a smooth trace; this one starts with a tip");
  for (const auto& s : trace.states)
    if (s.geometry.tip_index()) throw DomainError("residual needs a smooth trace; snapshot at t = " +
                                                  std::to_string(s.t) + " has a tip");
  if (trace.size() < 4) throw InsufficientData("residual needs at least four snapshots");
  if (stride == 0) throw MalformedInput("residual stride must be positive");
  const std::size_t n = trace.states.front().geometry.size();
  if (n < 2 * stride + 3) throw InsufficientData("too few samples for the residual stencil");
  std::vector<ReflectedProfile> sp;
  for (const auto& s : trace.states) {
    if (s.geometry.size() != n) throw InsufficientData("snapshots differ in sample count");
    sp.emplace_back(s.geometry, stride);
  }
  const auto m = static_cast<std::ptrdiff_t>(stride);

  HResidualSeries out;
  for (std::size_t k = 2; k + 1 < trace.size(); ++k) {
    const auto& c = sp[k];
    const auto& gm = trace.states[k - 1].geometry;
    const auto& gp = trace.states[k + 1].geometry;
    const double a = trace.states[k].t - trace.states[k - 1].t;
    const double b = trace.states[k + 1].t - trace.states[k].t;
    const double wm = -b / (a * (a + b)), w0 = (b - a) / (a * b), wp = a / (b * (a + b));
    auto flux = [&](std::ptrdiff_t i, std::ptrdiff_t j) {
      const Vec2 pi = c.at(i), pj = c.at(j);
      const double Hi = c.H_at(i), Hj = c.H_at(j);
      const double Hm = 0.5 * (Hi + Hj);
      return 0.5 * (pi.x() + pj.x()) * (Hj - Hi) / ((pj - pi).norm() * Hm * Hm);
    };
    double worst = 0.0;
    std::size_t worst_i = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!c.usable(i)) continue;
      const auto j = static_cast<std::ptrdiff_t>(i);
      const double H = c.c.H[i];
      double dHdt = wm * sp[k - 1].c.H[i] + w0 * H + wp * sp[k + 1].c.H[i];
      double div = 0.0;
      if (i == 0 || j == c.last()) {
        const std::ptrdiff_t q = i == 0 ? m : c.last() - m;
        const double h = (c.at(q) - c.at(j)).norm();
        div = 4.0 * (c.H_at(q) - H) / (h * h * H * H);
      } else {
        const double hm = (c.at(j) - c.at(j - m)).norm(), hp = (c.at(j + m) - c.at(j)).norm();
        div = (flux(j, j + m) - flux(j - m, j)) / (0.5 * (hm + hp) * c.p[i].x());
        // Same-index samples drift tangentially; remove that transport.
        const Vec2 T = (c.at(j + m) - c.at(j - m)).normalized();
        const Vec2 v = wm * gm[i] + w0 * c.p[i] + wp * gp[i];
        const double Hs = (c.H_at(j + m) - c.H_at(j - m)) / (hm + hp);
        dHdt -= v.dot(T) * Hs;
      }
      const double A2 = c.c.k1[i] * c.c.k1[i] + c.c.k2[i] * c.c.k2[i];
      const double res = std::abs(dHdt - div + A2 / H);
      if (res > worst) {
        worst = res;
        worst_i = i;
      }
    }
    out.t.push_back(trace.states[k].t);
    out.max_residual.push_back(worst);
    out.worst_sample.push_back(worst_i);
    out.overall_max = std::max(out.overall_max, worst);
  }
  return out;
}

SplitReport splitting_check(const flows::SphericalTrace& trace, double tol) {
  SplitReport rep;
  if (trace.empty()) return rep;
  std::optional<Vec3> dir;
  bool all = true;
  for (const auto& s : trace.states) {
    const auto& c = s.geometry;
    double best = kInf;
    Vec3 best_dir = Vec3::Zero();
    for (std::size_t i = 0; i < c.size(); ++i) {
      const double d = distance_to_curve(c, -c[i]);
      if (d < best) {
        best = d;
        best_dir = c[i];
      }
    }
    rep.residual = std::max(rep.residual, best);
    if (best > tol) {
      all = false;
      break;
    }
    if (!dir) {
      dir = best_dir;
    } else if (dir->cross(best_dir).norm() > tol) {
      // The pair may sit elsewhere on the curve at this time; test the first axis directly.
      const double d = std::max(distance_to_curve(c, *dir), distance_to_curve(c, -*dir));
      rep.residual = std::max(rep.residual, d);
      if (d > tol) {
        all = false;
        break;
      }
    }
  }
  rep.splits = all && dir.has_value();
  if (rep.splits) rep.direction = *dir;
  return rep;
}

SplitReport splitting_check(const flows::ProfileTrace& trace, double tol) {
  SplitReport rep;
  if (trace.empty()) return rep;
  bool all = true;
  for (const auto& s : trace.states) {
    const auto& g = s.geometry;
    if (g.closed()) {
      all = false;
      rep.residual = kInf;
      break;
    }
    double lo = kInf, hi = -kInf;
    for (const auto& q : g.samples()) {
      lo = std::min(lo, q.x());
      hi = std::max(hi, q.x());
    }
    rep.residual = std::max(rep.residual, hi - lo);
    all = all && hi - lo <= tol;
  }
  rep.splits = all;
  if (all) rep.direction = Vec3::UnitZ();
  return rep;
}

}  // namespace imcf::analysis
