#include "doctest.h"

#include "imcf/convex_geom.hpp"
#include "imcf/error.hpp"

#include <Eigen/Geometry>

#include <cmath>
#include <random>
#include <vector>

using namespace imcf;
using namespace imcf::geom;

namespace {

Mat3 random_rotation(unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g;
  Eigen::Quaterniond q(g(rng), g(rng), g(rng), g(rng));
  return q.normalized().toRotationMatrix();
}

// Exact perimeter of the geodesic polygon through unit corners a_i.
double polygon_perimeter(const std::vector<Vec3>& c) {
  double s = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) s += std::acos(std::clamp(c[i].dot(c[(i + 1) % c.size()]), -1.0, 1.0));
  return s;
}

}  // namespace

TEST_CASE("convexity of equator, cube-corner triangle and a dented curve") {
  CHECK(convexity_check(great_circle(64)).is_convex);
  CHECK(convexity_check(cube_corner_triangle(96)).is_convex);

  auto circ = latitude_circle(0.8, 40);
  std::vector<Vec3> pts(circ.points().begin(), circ.points().end());
  const std::size_t k = 10;
  const Vec3 n = pts[k - 1].cross(pts[k + 1]).normalized();
  const Vec3 dented = (pts[k] - 2.0 * n.dot(pts[k]) * n).normalized();
  pts[k] = dented;

  // Oracle: the dented point is a positive combination of its neighbours and
  // the pole, so it sits inside the cone hull instead of on its boundary.
  Mat3 M;
  M << pts[k - 1], pts[k + 1], Vec3::UnitZ();
  const Vec3 coeff = M.colPivHouseholderQr().solve(dented);
  CHECK((coeff.array() > 0.0).all());

  const auto rep = convexity_check(SphericalCurve(pts));
  CHECK_FALSE(rep.is_convex);
  CHECK(rep.worst_violation > 1e-4);
}

TEST_CASE("doubly wound circle is not simple") {
  std::vector<Vec3> pts;
  for (int i = 0; i < 60; ++i) {
    const double phi = 4.0 * kPi * i / 60.0;
    pts.emplace_back(std::sin(0.5) * std::cos(phi), std::sin(0.5) * std::sin(phi), std::cos(0.5));
  }
  const auto rep = convexity_check(SphericalCurve(pts));
  CHECK_FALSE(rep.simple);
  CHECK_FALSE(rep.is_convex);
}

TEST_CASE("curves need three points") {
  CHECK_THROWS_AS(SphericalCurve({Vec3::UnitX(), Vec3::UnitY()}), MalformedInput);
}

TEST_CASE("hemisphere reports") {
  const auto lat = hemisphere_report(latitude_circle(kPi / 4.0, 64));
  CHECK(lat.contained_in_open_hemisphere);
  CHECK((lat.witness_direction - Vec3::UnitZ()).norm() < 1e-6);

  const auto wedge = hemisphere_report(wedge_curve(kPi / 2.0, 64));
  CHECK(wedge.has_antipodal_pair);
  CHECK_FALSE(wedge.contained_in_open_hemisphere);

  const auto tri_curve = cube_corner_triangle(120);
  const auto tri = hemisphere_report(tri_curve);
  CHECK(tri.contained_in_open_hemisphere);
  CHECK((tri.witness_direction - Vec3(1, 1, 1).normalized()).norm() < 1e-6);
  double scan = 1.0;
  for (const auto& x : tri_curve.points()) scan = std::min(scan, tri.witness_direction.dot(x));
  CHECK(scan > 0.0);
  CHECK(scan == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-9));
}

TEST_CASE("hemisphere report rejects non-convex curves") {
  auto circ = latitude_circle(0.8, 40);
  std::vector<Vec3> pts(circ.points().begin(), circ.points().end());
  const Vec3 n = pts[9].cross(pts[11]).normalized();
  pts[10] = (pts[10] - 2.0 * n.dot(pts[10]) * n).normalized();
  CHECK_THROWS_AS(hemisphere_report(SphericalCurve(pts)), DomainError);
}

TEST_CASE("vertex links of cube, tetrahedron, octahedron and a flat vertex") {
  const auto cube = unit_cube();
  for (std::size_t v = 0; v < 8; ++v) {
    const auto link = vertex_link(cube, v);
    REQUIRE(link.curve);
    CHECK(link_length(link) == doctest::Approx(1.5 * kPi).epsilon(1e-13));
    CHECK(convexity_check(*link.curve).is_convex);
    CHECK(link.curve->polygon_corners().size() == 3);
  }

  const auto tet = regular_tetrahedron();
  for (std::size_t v = 0; v < 4; ++v) {
    const auto link = vertex_link(tet, v);
    const auto& c = link.curve->polygon_corners();
    REQUIRE(c.size() == 3);
    // Edges meet at 60 degrees, so each side has cos(side) = 1/2.
    for (std::size_t i = 0; i < 3; ++i) CHECK(arc_angle(c[i], c[(i + 1) % 3]) == doctest::Approx(kPi / 3.0));
    CHECK(link_length(link) == doctest::Approx(polygon_perimeter(c)));
    CHECK(link_length(link) == doctest::Approx(kPi));
    CHECK(convexity_check(*link.curve).is_convex);
  }

  const auto oct = regular_octahedron();
  for (std::size_t v = 0; v < 6; ++v) {
    const auto link = vertex_link(oct, v);
    CHECK(link.curve->polygon_corners().size() == 4);
    CHECK(link_length(link) == doctest::Approx(4.0 * kPi / 3.0));
    CHECK(convexity_check(*link.curve).is_convex);
  }

  const auto flat = cube_with_face_centre_vertex();
  const auto link = vertex_link(flat, 8);
  CHECK(link.flat);
  CHECK(link_length(link) == doctest::Approx(kTwoPi));
  CHECK(density_from_link(link).value == doctest::Approx(1.0));
  CHECK(convexity_check(*link.curve).is_convex);
}

TEST_CASE("surface point links on edges and faces") {
  const auto cube = unit_cube();
  const auto edge = surface_point_link(cube, Vec3(0.5, 0.0, 0.0));
  REQUIRE(edge.curve);
  const auto cls = wedge_or_equator_classify(*edge.curve);
  CHECK(cls.kind == ShapeClass::Wedge);
  CHECK(cls.wedge->dihedral_angle == doctest::Approx(kPi / 2.0).epsilon(1e-9));
  CHECK(density_from_link(edge).value == doctest::Approx(1.0));

  const auto face = surface_point_link(cube, Vec3(0.3, 0.4, 1.0));
  CHECK(face.flat);
  CHECK(wedge_or_equator_classify(*face.curve).kind == ShapeClass::Equator);
}

TEST_CASE("spherical length") {
  CHECK(spherical_length(great_circle(1000)) == doctest::Approx(kTwoPi).epsilon(1e-6));
  CHECK(spherical_length(cube_corner_triangle(300)) == doctest::Approx(1.5 * kPi).epsilon(1e-12));

  // Latitude circle: chord arcs undershoot 2 pi sin(alpha) at second order.
  const double alpha = 0.7;
  const double exact = kTwoPi * std::sin(alpha);
  const double e1 = exact - spherical_length(latitude_circle(alpha, 100));
  const double e2 = exact - spherical_length(latitude_circle(alpha, 200));
  CHECK(e1 > 0.0);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(1e-2));
  CHECK(spherical_length(latitude_circle(alpha, 4000)) == doctest::Approx(exact).epsilon(1e-6));
}

TEST_CASE("spherical length is rotation invariant") {
  const auto curve = latitude_circle(1.1, 257);
  const double base = spherical_length(curve);
  for (unsigned seed = 1; seed <= 5; ++seed) {
    CHECK(std::abs(spherical_length(curve.rotated(random_rotation(seed))) - base) <= 1e-12);
  }
}

TEST_CASE("convex curves are no longer than a great circle") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(0.05, 1.5);
  for (int trial = 0; trial < 20; ++trial) {
    const auto c = latitude_circle(u(rng), 64, random_rotation(trial + 11) * Vec3::UnitZ());
    CHECK(spherical_length(c) <= kTwoPi + 1e-12);
    CHECK(wedge_or_equator_classify(c).kind == ShapeClass::Neither);
  }
}

TEST_CASE("densities from links") {
  CHECK(density_from_link(vertex_link(unit_cube(), 0)).value == doctest::Approx(0.75));
  CHECK(density_from_link(vertex_link(regular_tetrahedron(), 0)).value == doctest::Approx(0.5));
  const auto corner = curve_corner_link(cube_corner_triangle(30), 0);
  REQUIRE(corner.direction_pair);
  CHECK(density_from_link(corner).value == 1.0);
}

TEST_CASE("ball-ratio density agrees with link density") {
  const std::vector<double> radii = {0.2, 0.1, 0.05};
  const auto cube = unit_cube();
  PolytopeSampler cs(cube);
  // Oracle: three quarter disks.
  CHECK(cs.area_in_ball(Vec3::Zero(), 0.2) == doctest::Approx(3.0 * kPi * 0.04 / 4.0).epsilon(1e-12));
  CHECK(density_ball_ratio(cs, Vec3::Zero(), radii).value == doctest::Approx(0.75).epsilon(1e-3));
  CHECK(density_ball_ratio(cs, Vec3(0.5, 0.5, 1.0), radii).value == doctest::Approx(1.0).epsilon(1e-3));

  for (const auto& poly : {unit_cube(), regular_tetrahedron(), regular_octahedron()}) {
    PolytopeSampler s(poly);
    for (std::size_t v = 0; v < poly.vertices().size(); ++v) {
      const double link_rho = density_from_link(vertex_link(poly, v)).value;
      const std::vector<double> small = {0.12, 0.06, 0.03};
      CHECK(std::abs(density_ball_ratio(s, poly.vertices()[v], small).value - link_rho) <= 1e-3);
    }
  }
}

TEST_CASE("ball-ratio density of a cone tip") {
  for (double theta : {0.4, 0.8, 1.2}) {
    const auto prof = ice_cream_cone(theta, 1.0, 801);
    ProfileSampler s(prof);
    const std::vector<double> radii = {0.4, 0.2, 0.1};
    // Oracle: lateral area of the cone inside the ball is pi r (r cos theta).
    CHECK(s.area_in_ball(Vec3::Zero(), 0.3) == doctest::Approx(kPi * 0.09 * std::cos(theta)).epsilon(1e-10));
    CHECK(density_ball_ratio(s, Vec3::Zero(), radii).value == doctest::Approx(std::cos(theta)).epsilon(1e-3));
  }
}

TEST_CASE("ball-ratio density input checks") {
  const auto cube = unit_cube();
  PolytopeSampler s(cube);
  const std::vector<double> up = {0.05, 0.1};
  CHECK_THROWS_AS(density_ball_ratio(s, Vec3::Zero(), up), DomainError);
  const std::vector<double> big = {1.5, 0.5};
  CHECK_THROWS_AS(density_ball_ratio(s, Vec3::Zero(), big), DomainError);
}

TEST_CASE("wedge or equator classification") {
  CHECK(wedge_or_equator_classify(great_circle(128)).kind == ShapeClass::Equator);
  const auto w = wedge_or_equator_classify(wedge_curve(kPi / 2.0, 128));
  REQUIRE(w.kind == ShapeClass::Wedge);
  CHECK(std::abs(w.wedge->dihedral_angle - kPi / 2.0) <= 1e-6);
  CHECK((w.wedge->axis_positive + w.wedge->axis_negative).norm() < 1e-12);
  for (double th : {0.3, 1.0, 2.5}) {
    const auto c = wedge_or_equator_classify(wedge_curve(th, 90, Vec3(1, 2, 3).normalized(), Vec3(1, -1, 0.3)));
    REQUIRE(c.kind == ShapeClass::Wedge);
    CHECK(c.wedge->dihedral_angle == doctest::Approx(th).epsilon(1e-9));
  }
  CHECK(wedge_or_equator_classify(cube_corner_triangle(99)).kind == ShapeClass::Neither);
}

TEST_CASE("product cone area ratio") {
  const auto gc = product_cone_area_ratio(great_circle(128), 64);
  CHECK(gc.lhs_ratio == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(gc.rhs_ratio == doctest::Approx(1.0).epsilon(1e-4));

  const auto lat = latitude_circle(0.6, 200);
  const double L = spherical_length(lat);
  // Oracle: the area element separates into sin(alpha) ds, so the area is 2L.
  const auto lr = product_cone_area_ratio(lat, 64);
  CHECK(lr.lhs_ratio == doctest::Approx(L / kTwoPi).epsilon(1e-12));
  CHECK(lr.rhs_ratio == doctest::Approx(2.0 * L / (4.0 * kPi)).epsilon(1e-4));

  const auto tri = cube_corner_triangle(90);
  const double c8 = product_cone_area_ratio(tri, 8).rhs_ratio;
  const double c16 = product_cone_area_ratio(tri, 16).rhs_ratio;
  const double c32 = product_cone_area_ratio(tri, 32).rhs_ratio;
  const double extrap = (16.0 * c32 - c16) / 15.0;
  CHECK(extrap == doctest::Approx(0.75).epsilon(1e-3));
  // Simpson in alpha: error ratio close to 16 under halving.
  CHECK((c8 - 0.75) / (c16 - 0.75) == doctest::Approx(16.0).epsilon(0.05));
  CHECK(product_cone_area_ratio(tri, 90).lhs_ratio == doctest::Approx(0.75));

  CHECK_THROWS_AS(product_cone_area_ratio(tri, 2), DomainError);
}

TEST_CASE("area comparison") {
  const auto tri = cube_corner_triangle(90);
  const auto r = area_comparison_check(tri, Vec3::UnitX());
  CHECK(r.lhs == doctest::Approx(0.75));
  CHECK(r.rhs == 1.0);
  CHECK_FALSE(r.splits);
  CHECK(r.inequality_holds);
  CHECK(r.equality_implies_split);

  const auto w = area_comparison_check(wedge_curve(kPi / 2.0, 64), Vec3::UnitZ());
  CHECK(w.lhs == doctest::Approx(1.0));
  CHECK(w.splits);
  CHECK(w.equality_implies_split);

  const double alpha = 0.3;
  const auto small = latitude_circle(alpha, 400);
  const auto s = area_comparison_check(small, small[17]);
  CHECK(s.lhs == doctest::Approx(std::sin(alpha)).epsilon(1e-4));
  CHECK(s.lhs < 1.0);
  CHECK_FALSE(s.splits);

  CHECK_THROWS_AS(area_comparison_check(tri, Vec3(1, 1, 1)), DomainError);
}

TEST_CASE("extrinsic measures") {
  const auto cube = extrinsic_measures(unit_cube());
  CHECK(cube.diameter == doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));
  CHECK(std::abs(cube.inradius - 0.5) <= 1e-8);
  CHECK((cube.incentre - Vec3(0.5, 0.5, 0.5)).norm() < 1e-8);

  const auto tet = extrinsic_measures(regular_tetrahedron());
  CHECK(tet.diameter == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(tet.inradius - 1.0 / std::sqrt(24.0)) <= 1e-8);

  CHECK_THROWS_AS(extrinsic_measures(degenerate_square()), DegenerateInput);
}

TEST_CASE("polytope validation") {
  std::vector<Vec3> v;
  for (int i = 0; i < 8; ++i) v.emplace_back(i & 1, (i >> 1) & 1, (i >> 2) & 1);
  // Inward-facing bottom face.
  std::vector<std::vector<std::size_t>> f = {{0, 1, 3, 2}, {4, 5, 7, 6}, {0, 1, 5, 4},
                                             {2, 6, 7, 3}, {0, 4, 6, 2}, {1, 3, 7, 5}};
  CHECK_THROWS_AS(ConvexPolytope(v, f), MalformedInput);
  const auto flat = cube_with_face_centre_vertex();
  CHECK_THROWS_AS(ConvexPolytope(flat.vertices(), flat.faces()), MalformedInput);
}
