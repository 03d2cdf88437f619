#include "doctest.h"

#include "imcf/analysis/analysis.hpp"
#include "imcf/convex_geom.hpp"
#include "imcf/error.hpp"
#include "imcf/flows/axisym_flow.hpp"
#include "imcf/flows/cone.hpp"
#include "imcf/flows/exact.hpp"
#include "imcf/flows/spherical_flow.hpp"
#include "imcf/flows/weak_flow.hpp"

#include <cmath>
#include <vector>

using namespace imcf;
using namespace imcf::analysis;

namespace {

flows::ProfileTrace ice_cream_trace(double theta0, std::size_t n, double t_end) {
  flows::AxisymRunOptions o;
  o.t_end = t_end;
  o.snapshot_interval = 0.01;
  return flows::evolve_axisym(geom::ice_cream_cone(theta0, 1.0, n), o);
}

flows::ProfileTrace sphere_trace(std::size_t n, double t_end, double interval) {
  flows::AxisymRunOptions o;
  o.t_end = t_end;
  o.snapshot_interval = interval;
  return flows::evolve_axisym(geom::sphere_profile(1.0, n), o);
}

flows::SphericalTrace stationary_trace(const geom::SphericalCurve& c, std::size_t copies) {
  flows::SphericalTrace tr;
  for (std::size_t k = 0; k < copies; ++k) tr.states.push_back({0.1 * static_cast<double>(k), c, {}, k});
  return tr;
}

}  // namespace

TEST_CASE("smoothing times of polytopes and smooth bodies") {
  const auto cube = smoothing_time(geom::unit_cube());
  CHECK(cube.T_smooth == doctest::Approx(std::log(4.0 / 3.0)).epsilon(1e-12));
  CHECK(cube.T_gamma == doctest::Approx(std::log(4.0 / 3.0)).epsilon(1e-12));
  CHECK(cube.T_theta == 0.0);
  CHECK(cube.T_bound == doctest::Approx(2.0 * std::log(2.0 * std::sqrt(3.0))).epsilon(1e-9));
  CHECK(std::isnan(cube.T_star));

  const auto tet = smoothing_time(geom::regular_tetrahedron());
  CHECK(tet.T_smooth == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  const auto oct = smoothing_time(geom::regular_octahedron());
  CHECK(oct.T_smooth < oct.T_bound);

  const auto sph = smoothing_time(geom::sphere_profile(1.0, 256));
  CHECK(sph.T_smooth == 0.0);
  CHECK(sph.T_bound == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-4));

  const auto ic = smoothing_time(geom::ice_cream_cone(kPi / 3, 1.0, 1024));
  CHECK(ic.T_smooth == doctest::Approx(std::log(2.0)).epsilon(2e-3));
  CHECK(ic.worst_point.norm() < 1e-12);
}

TEST_CASE("smoothing time agrees with the ball ratio density") {
  const auto cube = geom::unit_cube();
  const geom::PolytopeSampler sampler(cube);
  const std::vector<double> radii{0.2, 0.1, 0.05};
  const double rho = geom::density_ball_ratio(sampler, cube.vertices()[0], radii).value;
  CHECK(-std::log(rho) == doctest::Approx(smoothing_time(cube).T_smooth).epsilon(1e-3));
}

TEST_CASE("density is lower semicontinuous towards a vertex") {
  const auto cube = geom::unit_cube();
  const Vec3 v = cube.vertices()[0];
  const double rho_v = geom::density_from_link(geom::vertex_link(cube, 0)).value;
  const Vec3 along_edge = (cube.vertices()[1] - v).normalized();
  const Vec3 in_face = (cube.vertices()[1] + cube.vertices()[3] - 2.0 * v).normalized();
  for (double s : {0.3, 0.1, 0.01, 1e-4}) {
    for (const Vec3& dir : {along_edge, in_face}) {
      const double rho = geom::density_from_link(geom::surface_point_link(cube, v + s * dir)).value;
      CHECK(rho >= rho_v - 1e-12);
      CHECK(rho > rho_v + 0.1);
    }
  }
}

TEST_CASE("smoothing bound holds for compact bodies") {
  for (const auto& body : {geom::unit_cube(), geom::regular_tetrahedron(), geom::regular_octahedron()}) {
    const auto r = smoothing_bound_check(body);
    CHECK(r.holds);
    CHECK(r.T_smooth < r.T_bound);
  }
  const auto cube = smoothing_bound_check(geom::unit_cube());
  CHECK(cube.T_bound == doctest::Approx(2.4849066498).epsilon(1e-9));
  CHECK(smoothing_bound_check(geom::sphere_profile(2.0, 256)).holds);
  CHECK_THROWS_AS(smoothing_bound_check(geom::truncated_cylinder(1.0, 0.0, 1.0, 32)), DomainError);
}

TEST_CASE("maximal time of curve and arc regions") {
  const auto circ = geom::latitude_circle(kPi / 6, 64).with_exact_length(kPi);
  CHECK(maximal_time({circ, std::nullopt}) == doctest::Approx(flows::cone_flat_time(kPi / 3)).epsilon(1e-12));
  const LinkRegion arc{std::nullopt, std::pair{Vec3(1, 0, 0), Vec3(0, 1, 0)}};
  CHECK(maximal_time(arc) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(maximal_time({geom::great_circle(64).with_exact_length(kTwoPi), std::nullopt}) == 0.0);
  CHECK_THROWS_AS(maximal_time({geom::great_circle(64).with_exact_length(7.0), std::nullopt}), InvalidRegion);
  CHECK_THROWS_AS(maximal_time({}), InvalidRegion);
}

TEST_CASE("smoothing time equals maximal time on round cones") {
  for (double theta0 : {0.3, 0.7, kPi / 3, 1.3}) {
    flows::ConeSurface cone;
    cone.link = geom::latitude_circle(kPi / 2 - theta0, 128).with_exact_length(kTwoPi * std::cos(theta0));
    const auto ts = smoothing_time(cone);
    CHECK(ts.T_smooth == doctest::Approx(ts.T_star).epsilon(1e-12));
    CHECK(ts.T_star == doctest::Approx(-std::log(std::cos(theta0))).epsilon(1e-12));
  }
}

TEST_CASE("ice-cream cone waiting time, tip angle and truncation") {
  const auto tr = ice_cream_trace(kPi / 3, 1024, 0.85);
  REQUIRE(tr.tip_release_time.has_value());
  CHECK(*tr.tip_release_time == doctest::Approx(std::log(2.0)).epsilon(2e-3));
  const auto w = waiting_time(tr, Vec2(0.0, 0.0));
  CHECK_FALSE(w.censored);
  CHECK(w.t_wait > std::log(2.0));
  CHECK(w.t_wait < std::log(2.0) + 0.12);
  for (const auto& [t, d] : w.displacement)
    if (t < 0.69) CHECK(d == doctest::Approx(0.0).epsilon(1e-12));

  const auto s = cone_angle_series(tr, 0.02, 0.05, 0.6);
  CHECK(s.defined);
  CHECK(s.theta0 == doctest::Approx(kPi / 3).epsilon(1e-3));
  CHECK(s.max_deviation < 2e-2);
  REQUIRE(s.truncated_at.has_value());
  CHECK(*s.truncated_at == doctest::Approx(*tr.tip_release_time));

  const auto early = waiting_time(ice_cream_trace(kPi / 3, 256, 0.3), Vec2(0.0, 0.0));
  CHECK(early.censored);
  CHECK(early.t_wait == doctest::Approx(0.3));
}

TEST_CASE("waiting time grows with the cone angle and converges under refinement") {
  const auto w_small = waiting_time(ice_cream_trace(kPi / 4, 512, 0.6), Vec2(0.0, 0.0));
  const auto w_mid = waiting_time(ice_cream_trace(kPi / 3, 512, 0.9), Vec2(0.0, 0.0));
  CHECK(w_small.t_wait < w_mid.t_wait);
  const auto w_fine = waiting_time(ice_cream_trace(kPi / 3, 1024, 0.9), Vec2(0.0, 0.0));
  CHECK(std::abs(w_fine.t_wait - std::log(2.0)) < std::abs(w_mid.t_wait - std::log(2.0)));
}

TEST_CASE("smooth points start moving at once") {
  const auto w = waiting_time(sphere_trace(256, 0.2, 0.01), Vec2(0.0, -1.0));
  CHECK_FALSE(w.censored);
  CHECK(w.t_onset < 0.005);
}

TEST_CASE("spherical corner waiting time shrinks with the tolerance") {
  flows::WeakFlowOptions o;
  o.samples = 512;
  o.run.t_end = 0.08;
  o.run.snapshot_interval = 0.0025;
  o.workers = 2;
  const auto r = flows::run_weak_flow(geom::cube_corner_triangle(96), flows::EpsilonSchedule{{0.04, 0.02}}, o);
  const Vec3 corner(0.0, 0.0, 1.0);
  const auto coarse = waiting_time(r, corner, 4e-3);
  const auto fine = waiting_time(r, corner, 1e-3);
  const auto finer = waiting_time(r, corner, 2.5e-4);
  CHECK_FALSE(coarse.censored);
  CHECK(std::abs(coarse.displacement.front().second) < 1e-4);
  CHECK(fine.t_wait < coarse.t_wait);
  CHECK(finer.t_wait < fine.t_wait);
  // A single member starts outside the corner and must first sweep past it.
  const auto member = waiting_time(r.members.back(), corner, 1e-3);
  CHECK(member.displacement.front().second < 0.0);
}

TEST_CASE("smooth caps have no cone angle") {
  const auto s = cone_angle_series(sphere_trace(64, 0.05, 0.01), 0.02);
  CHECK_FALSE(s.defined);
  CHECK(s.truncated_at.has_value());
}

TEST_CASE("initial cone angle is recovered") {
  flows::AxisymRunOptions o;
  o.t_end = 0.02;
  o.snapshot_interval = 0.01;
  const auto tr = flows::evolve_axisym(geom::ice_cream_cone(kPi / 4, 1.0, 1024), o);
  CHECK(cone_angle_series(tr, 0.05).theta0 == doctest::Approx(kPi / 4).epsilon(1e-3));
}

TEST_CASE("Mann-Kendall trend test") {
  std::vector<double> up, flat, down;
  for (int k = 0; k < 30; ++k) {
    up.push_back(1.0 + 0.01 * k);
    flat.push_back(0.5 + 1e-13 * ((k * 7) % 5));
    down.push_back(1.0 - 0.01 * k);
  }
  CHECK(mann_kendall(up).upward_trend);
  CHECK(mann_kendall(up).S == doctest::Approx(435.0));
  CHECK_FALSE(mann_kendall(flat).upward_trend);
  CHECK(mann_kendall(flat).Z == 0.0);
  CHECK_FALSE(mann_kendall(down).upward_trend);
  CHECK(mann_kendall(down).Z < -1.6449);
}

TEST_CASE("monitor on the lifted round cone equals cot θ") {
  flows::SphericalRunOptions o;
  o.t_end = 0.6;
  o.snapshot_interval = 0.025;
  const auto cone = flows::lift_cone_flow(flows::evolve_spherical(geom::latitude_circle(kPi / 6, 256), o));
  const auto m = cd_monitor(cone, MonitorParams{}, 0.05, 0.6);
  REQUIRE(m.t.size() >= 20);
  for (std::size_t k = 0; k < m.t.size(); ++k) {
    const double cot = 1.0 / std::tan(flows::round_cone_exact(kPi / 3, m.t[k]));
    CHECK(m.sup_ratio[k] == doctest::Approx(cot).epsilon(1e-5));
    CHECK(m.normalized[k] == doctest::Approx(cot / (1.0 + 1.0 / std::sqrt(m.t[k]))).epsilon(1e-5));
  }
  CHECK(m.star_margin > 0.0);

  MonitorParams tight;
  tight.theta1 = 0.6;
  CHECK_THROWS_AS(cd_monitor(cone, tight, 0.05, 0.6), PreconditionViolation);
}

TEST_CASE("monitor on the expanding sphere") {
  const auto tr = sphere_trace(256, 0.6, 0.025);
  MonitorParams p;
  p.enforce_star_shape = false;
  p.fit_C = 0.5 + 1e-6;
  const auto m = cd_monitor(tr, p, 0.05, 0.6);
  for (double r : m.sup_ratio) CHECK(r == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(m.fit_C <= 0.5 + 1e-6);
  CHECK_FALSE(m.trend.upward_trend);
  CHECK(m.bounded);
  CHECK(m.star_margin < 0.0);
  CHECK_THROWS_AS(cd_monitor(tr, MonitorParams{}, 0.05, 0.6), PreconditionViolation);
}

TEST_CASE("mean curvature residual on the expanding sphere") {
  const auto r = h_evolution_residual(sphere_trace(512, 0.1, 0.002));
  CHECK(r.overall_max < 1e-6);
  CHECK(r.t.size() == r.max_residual.size());
  CHECK_THROWS_AS(h_evolution_residual(ice_cream_trace(kPi / 3, 512, 0.05)), DomainError);
  CHECK_THROWS_AS(h_evolution_residual(sphere_trace(64, 0.01, 0.01)), InsufficientData);
}

TEST_CASE("mean curvature residual converges on a spheroid") {
  std::vector<double> res;
  for (std::size_t n : {128, 256, 512}) {
    flows::AxisymRunOptions o;
    o.t_end = 0.1;
    o.snapshot_interval = 0.32 / static_cast<double>(n);
    o.dt.error_tol = 1e-10;
    res.push_back(h_evolution_residual(flows::evolve_axisym(geom::spheroid_profile(1.0, 1.5, n), o)).overall_max);
  }
  CHECK(std::log2(res[0] / res[1]) >= 1.5);
  CHECK(std::log2(res[1] / res[2]) >= 1.5);
}

TEST_CASE("splitting detection") {
  const auto wedge = geom::wedge_curve(kPi / 3, 128);
  const auto w = splitting_check(stationary_trace(wedge, 4));
  CHECK(w.splits);
  CHECK(std::abs(w.direction.z()) == doctest::Approx(1.0).epsilon(1e-9));

  flows::SphericalRunOptions o;
  o.t_end = 0.2;
  o.snapshot_interval = 0.1;
  CHECK_FALSE(splitting_check(flows::evolve_spherical(geom::latitude_circle(0.8, 128), o)).splits);

  flows::AxisymRunOptions po;
  po.t_end = 0.1;
  po.snapshot_interval = 0.05;
  const auto cyl = splitting_check(flows::evolve_axisym(geom::truncated_cylinder(1.0, -1.0, 1.0, 64), po));
  CHECK(cyl.splits);
  CHECK(cyl.direction == Vec3::UnitZ());
  CHECK_FALSE(splitting_check(sphere_trace(64, 0.05, 0.05)).splits);
}
