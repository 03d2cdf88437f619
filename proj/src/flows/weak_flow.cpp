#include "imcf/flows/weak_flow.hpp"

#include "imcf/convex_geom.hpp"
#include "imcf/detail/extrapolate.hpp"
#include "imcf/error.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <string>

namespace imcf::flows {

double WeakFlowResult::max_nesting_violation() const {
  double v = 0.0;
  for (const auto& c : nesting) v = std::max(v, c.violation);
  return v;
}

std::vector<double> radial_function(std::span<const Vec3> pts, const Vec3& centre, std::span<const double> phi) {
  const auto [e1, e2] = orthonormal_complement(centre);
  const std::size_t n = pts.size();
  std::vector<double> rho(phi.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t k = 0; k < phi.size(); ++k) {
    const Vec3 d = std::cos(phi[k]) * e1 + std::sin(phi[k]) * e2;
    const Vec3 q = centre.cross(d);
    for (std::size_t i = 0; i < n; ++i) {
      const Vec3& a = pts[i];
      const Vec3& b = pts[(i + 1) % n];
      const double sa = q.dot(a);
      const double sb = q.dot(b);
      if ((sa > 0.0 && sb > 0.0) || (sa < 0.0 && sb < 0.0) || sa == sb) continue;
      const Vec3 p = (a + (sa / (sa - sb)) * (b - a)).normalized();
      if (p.dot(d) <= 0.0) continue;
      rho[k] = std::atan2(p.dot(d), p.dot(centre));
      break;
    }
    if (std::isnan(rho[k])) throw DomainError("radial function: centre is not inside the curve");
  }
  return rho;
}

double containment_violation(std::span<const Vec3> outer, std::span<const Vec3> inner) {
  const std::size_t n = outer.size();
  std::vector<Vec3> m(n);
  for (std::size_t i = 0; i < n; ++i) m[i] = outer[i].cross(outer[(i + 1) % n]).normalized();
  double worst = 0.0;
  for (const auto& x : inner) {
    double s = std::numeric_limits<double>::infinity();
    for (const auto& mi : m) s = std::min(s, mi.dot(x));
    worst = std::max(worst, -s);
  }
  return worst;
}

double grid_tolerance(std::span<const Vec3> pts) {
  const auto kappa = geodesic_curvatures(pts);
  const std::size_t n = pts.size();
  double tol = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double h = arc_angle(pts[i], pts[(i + 1) % n]);
    const double k = std::max(std::abs(kappa[i]), std::abs(kappa[(i + 1) % n]));
    tol = std::max(tol, h * h * k / 8.0);
  }
  return tol + 1e-9;
}

namespace {

double extrapolated_measure(const Diagnostics& d) {
  const double v = d.monitor("length_extrapolated");
  return std::isnan(v) ? d.measure : v;
}

// Extrapolation of values at the schedule's finest entries to ε = 0.
double limit_value(std::span<const double> eps, std::span<const double> vals, int order) {
  const std::size_t m = eps.size();
  if (m == 1) return vals[0];
  if (order >= 2 && m >= 3) return detail::neville_at_zero(eps.subspan(m - 3), vals.subspan(m - 3));
  return detail::richardson(vals[m - 2], vals[m - 1], eps[m - 2] / eps[m - 1], 1.0);
}

}  // namespace

WeakFlowResult run_weak_flow(const geom::SphericalCurve& initial, const EpsilonSchedule& schedule,
                             const WeakFlowOptions& options) {
  schedule.validate();
  if (options.richardson_order < 1 || options.richardson_order > 2)
    throw MalformedInput("richardson order must be 1 or 2");
  if (!geom::convexity_check(initial).is_convex) throw DomainError("weak flow needs a convex initial curve");
  const double L0 = initial.exact_length().value_or(geom::spherical_length(initial));
  const double T_eq = std::log(kTwoPi / L0);
  if (options.run.t_end >= T_eq)
    throw DomainError("t_end " + std::to_string(options.run.t_end) + " is not below the equator time " +
                      std::to_string(T_eq));

  const auto& eps = schedule.epsilons;
  const std::size_t m = eps.size();
  const std::size_t n = options.samples ? options.samples : initial.size();

  std::vector<geom::SphericalCurve> starts;
  starts.reserve(m);
  for (double e : eps) starts.push_back(inner_approximation(initial, e, n, schedule.rounding_rule));

  WeakFlowResult out;
  out.members.resize(m);
  auto run_one = [&](std::size_t i) {
    SphericalRunOptions run = options.run;
    if (options.member_observer) run.observer = [&, i](const SphericalState& st) { options.member_observer(i, st); };
    SphericalTrace tr = evolve_spherical(starts[i], run);
    tr.epsilon = eps[i];
    return tr;
  };
  const std::size_t workers = std::max<std::size_t>(1, options.workers);
  if (workers == 1) {
    for (std::size_t i = 0; i < m; ++i) out.members[i] = run_one(i);
  } else {
    for (std::size_t base = 0; base < m; base += workers) {
      std::vector<std::future<SphericalTrace>> jobs;
      for (std::size_t i = base; i < std::min(m, base + workers); ++i)
        jobs.push_back(std::async(std::launch::async, run_one, i));
      for (std::size_t i = base; i < std::min(m, base + workers); ++i) out.members[i] = jobs[i - base].get();
    }
  }

  // Snapshot times present in every member.
  std::vector<std::vector<std::size_t>> index(m);
  for (const auto& s0 : out.members.back().states) {
    std::vector<std::size_t> hit(m);
    bool all = true;
    for (std::size_t i = 0; i < m && all; ++i) {
      const auto& st = out.members[i].states;
      auto it = std::find_if(st.begin(), st.end(), [&](const auto& s) { return std::abs(s.t - s0.t) < 1e-12; });
      if (it == st.end()) all = false;
      else hit[i] = static_cast<std::size_t>(it - st.begin());
    }
    if (!all) continue;
    for (std::size_t i = 0; i < m; ++i) index[i].push_back(hit[i]);
  }
  const std::size_t times = index[0].size();
  if (times == 0) throw InsufficientData("weak flow members share no snapshot times");

  // Nesting: the member with smaller ε must contain the one with larger ε.
  for (std::size_t k = 0; k < times; ++k) {
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = i + 1; j < m; ++j) {
        const auto& big = out.members[i].states[index[i][k]];
        const auto& small = out.members[j].states[index[j][k]];
        NestingCheck c;
        c.t = small.t;
        c.eps_outer = eps[j];
        c.eps_inner = eps[i];
        c.violation = containment_violation(small.geometry.points(), big.geometry.points());
        c.tolerance = options.nesting_tolerance >= 0.0 ? options.nesting_tolerance : grid_tolerance(small.geometry.points());
        if (c.violation > c.tolerance)
          throw SolverInconsistency("nesting violated at t = " + std::to_string(c.t) + " between eps " +
                                    std::to_string(c.eps_inner) + " and " + std::to_string(c.eps_outer) + ": " +
                                    std::to_string(c.violation) + " > " + std::to_string(c.tolerance));
        out.nesting.push_back(c);
      }
    }
  }

  // Limit in geodesic polar coordinates about a point inside the smallest region.
  {
    Vec3 c = Vec3::Zero();
    for (const auto& p : out.members.front().states.front().geometry.points()) c += p;
    out.centre = c.normalized();
  }
  const auto [e1, e2] = orthonormal_complement(out.centre);
  std::vector<double> phi(n);
  for (std::size_t q = 0; q < n; ++q) phi[q] = kTwoPi * static_cast<double>(q) / static_cast<double>(n);

  SphericalTrace& lim = out.limit;
  lim.stop_reason = out.members.back().stop_reason;
  for (std::size_t k = 0; k < times; ++k) {
    std::vector<std::vector<double>> rho(m);
    std::vector<double> lengths(m), polygon_lengths(m);
    for (std::size_t i = 0; i < m; ++i) {
      const auto& st = out.members[i].states[index[i][k]];
      rho[i] = radial_function(st.geometry.points(), out.centre, phi);
      lengths[i] = extrapolated_measure(out.members[i].diagnostics[index[i][k]]);
      polygon_lengths[i] = out.members[i].diagnostics[index[i][k]].measure;
    }
    std::vector<Vec3> pts(n);
    double spread = 0.0;
    for (std::size_t q = 0; q < n; ++q) {
      std::vector<double> v(m);
      double envelope = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        v[i] = rho[i][q];
        envelope = std::max(envelope, v[i]);
      }
      const double r = std::max(envelope, limit_value(eps, v, options.richardson_order));
      spread = std::max(spread, r - envelope);
      const Vec3 d = std::cos(phi[q]) * e1 + std::sin(phi[q]) * e2;
      pts[q] = (std::cos(r) * out.centre + std::sin(r) * d).normalized();
    }
    SphericalState s;
    s.t = out.members.back().states[index.back()[k]].t;
    s.step_index = k;
    s.curvature = geodesic_curvatures(pts);
    s.geometry = geom::SphericalCurve(std::move(pts), {}, initial.tolerance());

    Diagnostics d;
    d.step = k;
    d.t = s.t;
    d.measure = limit_value(eps, polygon_lengths, options.richardson_order);
    const auto [lo, hi] = std::minmax_element(s.curvature.begin(), s.curvature.end());
    d.kappa_min = *lo;
    d.kappa_max = *hi;
    d.set_monitor("length_extrapolated", limit_value(eps, lengths, options.richardson_order));
    d.set_monitor("length_polygon", geom::spherical_length(s.geometry));
    d.set_monitor("richardson_gap", spread);
    double nest = 0.0;
    for (const auto& c : out.nesting)
      if (std::abs(c.t - s.t) < 1e-12) nest = std::max(nest, c.violation);
    d.set_monitor("nesting_violation", nest);
    lim.states.push_back(std::move(s));
    lim.diagnostics.push_back(std::move(d));
  }
  lim.step_log = lim.diagnostics;
  return out;
}

}  // namespace imcf::flows
