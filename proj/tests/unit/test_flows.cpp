#include "doctest.h"

#include "imcf/convex_geom.hpp"
#include "imcf/error.hpp"
#include "imcf/flows/axisym_flow.hpp"
#include "imcf/flows/cone.hpp"
#include "imcf/flows/exact.hpp"
#include "imcf/flows/inner_approximation.hpp"
#include "imcf/flows/spherical_flow.hpp"
#include "imcf/flows/weak_flow.hpp"

#include <boost/numeric/odeint.hpp>

#include <cmath>
#include <vector>

using namespace imcf;
using namespace imcf::flows;

namespace {

namespace odeint = boost::numeric::odeint;

// Integrates y' = f(y) with dopri5 and returns y at each requested time.
template <class F>
std::vector<double> dopri(F f, double y0, const std::vector<double>& times) {
  std::vector<double> out;
  std::vector<double> y{y0};
  auto stepper = odeint::make_dense_output(1e-13, 1e-13, odeint::runge_kutta_dopri5<std::vector<double>>());
  auto rhs = [&](const std::vector<double>& x, std::vector<double>& dx, double) { dx[0] = f(x[0]); };
  odeint::integrate_times(stepper, rhs, y, times.begin(), times.end(), 1e-4,
                          [&](const std::vector<double>& x, double) { out.push_back(x[0]); });
  return out;
}

double max_length_law_error(const SphericalTrace& tr) {
  const double L0 = tr.diagnostics.front().monitor("length_extrapolated");
  double e = 0.0;
  for (const auto& d : tr.diagnostics) e = std::max(e, std::abs(std::log(d.monitor("length_extrapolated") / L0) - d.t));
  return e;
}

double max_area_law_error(const ProfileTrace& tr) {
  const double A0 = tr.diagnostics.front().measure;
  double e = 0.0;
  for (const auto& d : tr.diagnostics) e = std::max(e, std::abs(std::log(d.measure / A0) - d.t));
  return e;
}

double mean_colatitude(const geom::SphericalCurve& c) {
  double s = 0.0;
  for (const auto& p : c.points()) s += std::acos(std::clamp(p.z(), -1.0, 1.0));
  return s / static_cast<double>(c.size());
}

}  // namespace

TEST_CASE("closed-form cone and circle solutions") {
  CHECK(round_cone_exact(kPi / 3, 0.0) == doctest::Approx(kPi / 3).epsilon(1e-15));
  CHECK(cone_flat_time(kPi / 3) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(round_cone_exact(kPi / 4, 0.2) == doctest::Approx(std::acos(std::exp(0.2) / std::sqrt(2.0))));
  CHECK_THROWS_AS(round_cone_exact(kPi / 3, std::log(2.0) + 1e-9), FlatCone);
  CHECK_THROWS_AS(round_cone_exact(kPi / 2, 0.0), DomainError);
  CHECK(latitude_circle_exact(kPi / 6, std::log(2.0)) == doctest::Approx(kPi / 2));
  CHECK_THROWS_AS(latitude_circle_exact(kPi / 6, std::log(2.0) + 1e-6), PastEquator);
  CHECK(equator_time(1.5 * kPi) == doctest::Approx(std::log(4.0 / 3.0)).epsilon(1e-15));
  CHECK_THROWS_AS(equator_time(0.0), DomainError);
}

TEST_CASE("round cone and latitude circle agree with dopri5 integration") {
  std::vector<double> ts;
  const double T = std::log(2.0) - 1e-3;
  for (int k = 0; k <= 50; ++k) ts.push_back(T * k / 50.0);
  const auto theta = dopri([](double th) { return -1.0 / std::tan(th); }, kPi / 3, ts);
  const auto alpha = dopri([](double a) { return std::tan(a); }, kPi / 6, ts);
  REQUIRE(theta.size() == ts.size());
  double e1 = 0.0, e2 = 0.0;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    e1 = std::max(e1, std::abs(theta[k] - round_cone_exact(kPi / 3, ts[k])));
    e2 = std::max(e2, std::abs(alpha[k] - latitude_circle_exact(kPi / 6, ts[k])));
  }
  CHECK(e1 < 1e-8);
  CHECK(e2 < 1e-8);
}

TEST_CASE("latitude circle follows the exact colatitude and the length law") {
  SphericalRunOptions o;
  o.t_end = 0.2;
  o.snapshot_interval = 0.05;
  std::vector<double> errs;
  for (std::size_t n : {64, 128, 256}) {
    const auto tr = evolve_spherical(geom::latitude_circle(kPi / 4, n), o);
    REQUIRE(tr.t_end() == doctest::Approx(0.2));
    for (const auto& s : tr.states)
      CHECK(mean_colatitude(s.geometry) == doctest::Approx(latitude_circle_exact(kPi / 4, s.t)).epsilon(1e-4));
    errs.push_back(max_length_law_error(tr));
  }
  CHECK(errs.back() < 1e-3);
  CHECK(errs[2] <= errs[0]);
}

TEST_CASE("equator sits at the curvature floor") {
  const auto s = make_spherical_state(geom::great_circle(64));
  CHECK_THROWS_AS(step_spherical_imcf(s, 1e-3), CurvatureFloor);
}

TEST_CASE("redistribution keeps spacing uniform and curves convex") {
  const auto c = inner_approximation(geom::cube_corner_triangle(256), 0.04, 256);
  SphericalRunOptions o;
  o.t_end = 0.1;
  o.snapshot_interval = 0.05;
  o.check_convexity = true;
  const auto tr = evolve_spherical(c, o);
  for (const auto& s : tr.states) CHECK(geom::convexity_check(s.geometry).is_convex);
  for (const auto& d : tr.diagnostics) CHECK(d.monitor("convexity_violation") <= 1e-9);
  CHECK(max_length_law_error(tr) < 1e-3);
}

TEST_CASE("inner approximation of the cube-corner triangle and of circles") {
  const auto tri = geom::cube_corner_triangle(96);
  // Offsetting each side to the circle at height sin 2ε and rounding by ε.
  for (auto [eps, len] : {std::pair{0.1, 3.95298}, {0.08, 4.11073}, {0.04, 4.41668}}) {
    const auto a = inner_approximation(tri, eps, 512);
    REQUIRE(a.exact_length().has_value());
    CHECK(*a.exact_length() == doctest::Approx(len).epsilon(2e-6));
    CHECK(geom::spherical_length(a) == doctest::Approx(len).epsilon(1e-3));
    CHECK(geom::convexity_check(a).is_convex);
    const auto k = geodesic_curvatures(a.points());
    CHECK(*std::min_element(k.begin(), k.end()) > 0.0);
  }
  CHECK_THROWS_AS(inner_approximation(tri, kPi / 4, 128), DomainError);

  const auto circ = inner_approximation(geom::latitude_circle(0.7, 200), 0.05);
  CHECK(circ.size() == 200);
  for (const auto& p : circ.points()) CHECK(std::acos(p.z()) == doctest::Approx(0.65).epsilon(1e-12));
  CHECK_THROWS_AS(inner_approximation(geom::latitude_circle(0.1, 64), 0.05), DomainError);
}

TEST_CASE("epsilon schedules are validated") {
  const EpsilonSchedule good{{0.08, 0.04, 0.02}};
  CHECK_NOTHROW(good.validate());
  for (const std::vector<double>& bad : {std::vector<double>{}, {0.04, 0.08}, {0.04, 0.04}, {0.04, -0.01}}) {
    const EpsilonSchedule s{bad};
    CHECK_THROWS_AS(s.validate(), MalformedInput);
  }
  CHECK(rounding_rule_from_string(to_string(RoundingRule::inner_parallel)) == RoundingRule::inner_parallel);
}

TEST_CASE("weak flow members stay nested and the limit follows the length law") {
  WeakFlowOptions o;
  o.samples = 256;
  o.run.t_end = 0.1;
  o.run.snapshot_interval = 0.05;
  o.workers = 2;
  const auto r = run_weak_flow(geom::cube_corner_triangle(96), EpsilonSchedule{{0.08, 0.04}}, o);
  REQUIRE(r.members.size() == 2);
  CHECK(r.members[0].epsilon == doctest::Approx(0.08));
  CHECK_FALSE(r.nesting.empty());
  for (const auto& n : r.nesting) CHECK(n.violation <= n.tolerance);
  const double L0 = r.limit.diagnostics.front().monitor("length_extrapolated");
  CHECK(L0 == doctest::Approx(1.5 * kPi).epsilon(2e-3));
  for (const auto& d : r.limit.diagnostics)
    CHECK(std::log(d.monitor("length_extrapolated") / L0) == doctest::Approx(d.t).epsilon(1e-3));

  WeakFlowOptions late = o;
  late.run.t_end = 0.3;
  const EpsilonSchedule sched{{0.08, 0.04}}, reversed{{0.04, 0.08}};
  const auto tri = geom::cube_corner_triangle(96);
  CHECK_THROWS_AS(run_weak_flow(tri, sched, late), DomainError);
  CHECK_THROWS_AS(run_weak_flow(tri, reversed, o), MalformedInput);
}

TEST_CASE("containment violation detects crossing curves") {
  const auto big = geom::latitude_circle(0.6, 128);
  const auto small = geom::latitude_circle(0.5, 128);
  CHECK(containment_violation(big.points(), small.points()) == 0.0);
  CHECK(containment_violation(small.points(), big.points()) == doctest::Approx(std::sin(0.1)).epsilon(1e-3));
  CHECK(grid_tolerance(big.points()) > 1e-9);
}

TEST_CASE("lifted round cone matches the cone ODE") {
  SphericalRunOptions o;
  o.t_end = 0.5;
  o.snapshot_interval = 0.1;
  const auto tr = evolve_spherical(geom::latitude_circle(kPi / 6, 256), o);
  const auto cone = lift_cone_flow(tr, 2.0);
  REQUIRE(cone.size() == tr.size());
  for (std::size_t k = 0; k < cone.size(); ++k) {
    const double exact = round_cone_exact(kPi / 3, cone.states[k].t);
    CHECK(cone.diagnostics[k].monitor("cone_angle") == doctest::Approx(exact).epsilon(1e-4));
    CHECK(cone.diagnostics[k].monitor("cone_angle_equivalent") == doctest::Approx(exact).epsilon(1e-4));
    CHECK(cone.states[k].geometry.area() == doctest::Approx(2.0 * geom::spherical_length(tr.states[k].geometry)));
  }
  const auto& g = cone.states.front().geometry;
  CHECK(g.mean_curvature(0, 2.0) == doctest::Approx(g.link_curvature[0] / 2.0));
  CHECK_THROWS_AS(g.mean_curvature(0, 0.0), DomainError);
  CHECK_FALSE(g.is_flat());
  CHECK(g.point(3, 2.0).norm() == doctest::Approx(2.0));
}

TEST_CASE("sphere profile expands homothetically") {
  AxisymRunOptions o;
  o.t_end = 0.5;
  o.snapshot_interval = 0.1;
  const auto tr = evolve_axisym(geom::sphere_profile(1.0, 256), o);
  for (const auto& s : tr.states)
    for (const auto& p : s.geometry.samples()) CHECK(p.norm() == doctest::Approx(std::exp(s.t / 2.0)).epsilon(1e-4));
  CHECK(max_area_law_error(tr) < 1e-6);
  CHECK_FALSE(tr.had_tip);
}

TEST_CASE("area law on spheroids improves under refinement") {
  AxisymRunOptions o;
  o.t_end = 0.2;
  o.snapshot_interval = 0.05;
  const double e1 = max_area_law_error(evolve_axisym(geom::spheroid_profile(1.0, 1.5, 64), o));
  const double e2 = max_area_law_error(evolve_axisym(geom::spheroid_profile(1.0, 1.5, 256), o));
  CHECK(e2 < 1e-3);
  CHECK(e2 < e1);
}

TEST_CASE("held tip stays fixed until release") {
  AxisymRunOptions o;
  o.t_end = 0.3;
  o.snapshot_interval = 0.05;
  const auto tr = evolve_axisym(geom::ice_cream_cone(kPi / 3, 1.0, 512), o);
  CHECK(tr.had_tip);
  CHECK_FALSE(tr.tip_release_time.has_value());
  for (const auto& d : tr.diagnostics) {
    CHECK(d.tip_r == 0.0);
    CHECK(d.tip_z == doctest::Approx(0.0).epsilon(1e-14));
  }
  CHECK(tr.diagnostics.front().monitor("tip_angle") == doctest::Approx(kPi / 3).epsilon(1e-3));
  CHECK(max_area_law_error(tr) < 1e-4);
  CHECK(tip_release_from_string("angle_trigger") == TipRelease::angle_trigger);
  CHECK_THROWS_AS(tip_release_from_string("sometimes"), UsageError);
}

TEST_CASE("predicted release replaces the tip by a convex cap") {
  AxisymRunOptions o;
  o.t_end = 0.2;
  o.snapshot_interval = 0.05;
  o.release_time = 0.1;
  const auto tr = evolve_axisym(geom::ice_cream_cone(kPi / 3, 1.0, 512), o);
  REQUIRE(tr.tip_release_time.has_value());
  CHECK(*tr.tip_release_time == doctest::Approx(0.1));
  CHECK_FALSE(tr.states.back().geometry.tip_index().has_value());
  const auto c = profile_curvature(tr.states.back().geometry);
  CHECK(*std::min_element(c.H.begin(), c.H.end()) > 0.0);
}

TEST_CASE("profile step rejects a sample crossing the axis") {
  // Inner side of a thin torus: outward normal points at the axis.
  std::vector<Vec2> pts;
  for (int k = 0; k <= 40; ++k) {
    const double phi = kPi * (100.0 + 160.0 * k / 40.0) / 180.0;
    pts.emplace_back(1.0 + 0.1 * std::cos(phi), 0.1 * std::sin(phi));
  }
  const auto s = make_profile_state(geom::AxisymProfile(pts, false));
  CHECK_NOTHROW(step_axisym_imcf(s, 1e-3));
  DtPolicy p;
  p.scheme = TimeScheme::explicit_euler;
  CHECK_THROWS_AS(step_axisym_imcf(s, 20.0, p), StepRejected);
}

TEST_CASE("semi-implicit and explicit schemes agree on the sphere") {
  AxisymRunOptions o;
  o.t_end = 0.1;
  o.snapshot_interval = 0.05;
  o.dt.scheme = TimeScheme::explicit_euler;
  const auto tr = evolve_axisym(geom::sphere_profile(1.0, 64), o);
  CHECK(tr.states.back().geometry[10].norm() == doctest::Approx(std::exp(0.05)).epsilon(1e-5));
  CHECK(time_scheme_from_string(to_string(TimeScheme::semi_implicit)) == TimeScheme::semi_implicit);
}

TEST_CASE("tip angle fit and smoothing") {
  const auto ic = geom::ice_cream_cone(kPi / 4, 1.0, 1024);
  CHECK(tip_cone_angle(ic, 0.05) == doctest::Approx(kPi / 4).epsilon(1e-3));
  CHECK_THROWS_AS(tip_cone_angle(geom::sphere_profile(1.0, 64), 0.05), DomainError);
  const auto sm = smooth_tip(ic, 0.1);
  CHECK_FALSE(sm.tip_index().has_value());
  CHECK(sm.size() == ic.size());
  const auto c = profile_curvature(sm);
  CHECK(*std::min_element(c.H.begin(), c.H.end()) > 0.0);
}
