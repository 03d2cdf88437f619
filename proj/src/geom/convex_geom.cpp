#include "imcf/convex_geom.hpp"

#include "imcf/detail/linprog.hpp"
#include "imcf/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace imcf::geom {

namespace {

// sin of the turning angle at sample i, positive for a counterclockwise turn.
double turning_sine(const Vec3& prev, const Vec3& x, const Vec3& next) {
  const Vec3 a = x - prev;
  const Vec3 b = next - x;
  const double denom = a.norm() * b.norm();
  if (denom == 0.0) return 0.0;
  return a.cross(b).dot(x) / denom;
}

double winding_about(std::span<const Vec3> pts, const Vec3& c) {
  const auto [e1, e2] = orthonormal_complement(c);
  double total = 0.0;
  double prev = std::atan2(pts.back().dot(e2), pts.back().dot(e1));
  for (const auto& x : pts) {
    const double ang = std::atan2(x.dot(e2), x.dot(e1));
    double d = ang - prev;
    while (d > kPi) d -= kTwoPi;
    while (d < -kPi) d += kTwoPi;
    total += d;
    prev = ang;
  }
  return total / kTwoPi;
}

}  // namespace

ConvexityReport convexity_check(const SphericalCurve& curve) {
  const auto pts = curve.points();
  const std::size_t n = pts.size();
  if (n < 3) throw MalformedInput("convexity check needs at least 3 points");

  ConvexityReport out;
  out.tolerance = curve.tolerance();

  std::vector<double> turn(n);
  double turn_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    turn[i] = turning_sine(pts[(i + n - 1) % n], pts[i], pts[(i + 1) % n]);
    turn_sum += turn[i];
  }
  const double s = turn_sum >= 0.0 ? 1.0 : -1.0;

  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, -s * turn[i]);

  std::vector<Vec3> normals(n);
  Vec3 normal_sum = Vec3::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 m = pts[i].cross(pts[(i + 1) % n]);
    normals[i] = s * m.normalized();
    normal_sum += normals[i];
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3& ni = normals[i];
    for (std::size_t j = 0; j < n; ++j) worst = std::max(worst, -ni.dot(pts[j]));
  }

  Vec3 point_sum = Vec3::Zero();
  for (const auto& x : pts) point_sum += x;
  Vec3 centre = Vec3::UnitZ();
  if (point_sum.norm() > 1e-6 * static_cast<double>(n)) centre = point_sum.normalized();
  else if (normal_sum.norm() > 1e-12) centre = normal_sum.normalized();
  const double winding = s * winding_about(pts, centre);
  out.simple = std::abs(winding - 1.0) < 0.5;
  if (!out.simple) worst = std::max(worst, std::abs(winding - 1.0));

  out.worst_violation = worst;
  out.is_convex = out.simple && worst <= out.tolerance;
  return out;
}

HemisphereReport hemisphere_report(const SphericalCurve& curve) {
  const auto conv = convexity_check(curve);
  if (!conv.is_convex) throw DomainError("hemisphere report needs a convex curve");
  const auto pts = curve.points();
  const std::size_t n = pts.size();

  // maximize t  s.t.  t - <v, x_j> <= 0,  |v_k| <= 1, over an active subset
  // of samples grown by cutting planes.
  std::vector<std::size_t> active;
  const std::size_t stride = std::max<std::size_t>(1, n / 128);
  for (std::size_t j = 0; j < n; j += stride) active.push_back(j);
  for (std::size_t j = 0; j < n; ++j)
    if (curve.corner_flags()[j] && j % stride != 0) active.push_back(j);

  HemisphereReport out;
  Vec3 v = Vec3::Zero();
  double t_star = 0.0;
  for (int round = 0; round < 64; ++round) {
    const auto m = static_cast<Eigen::Index>(active.size() + 6);
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, 4);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
    for (std::size_t r = 0; r < active.size(); ++r) {
      const auto row = static_cast<Eigen::Index>(r);
      A.block(row, 0, 1, 3) = -pts[active[r]].transpose();
      A(row, 3) = 1.0;
    }
    for (int k = 0; k < 3; ++k) {
      const auto base = static_cast<Eigen::Index>(active.size()) + 2 * k;
      A(base, k) = 1.0;
      A(base + 1, k) = -1.0;
      b(base) = 1.0;
      b(base + 1) = 1.0;
    }
    Eigen::VectorXd c = Eigen::VectorXd::Zero(4);
    c(3) = 1.0;
    const auto lp = detail::maximize_free(c, A, b);
    if (lp.status != detail::LpResult::Status::optimal) throw SolverInconsistency("hemisphere program unbounded");
    v = lp.x.head(3);
    t_star = lp.x(3);

    // Add the worst uncovered samples.
    std::vector<std::pair<double, std::size_t>> viol;
    for (std::size_t j = 0; j < n; ++j) {
      const double g = v.dot(pts[j]) - t_star;
      if (g < -1e-12) viol.emplace_back(g, j);
    }
    if (viol.empty()) break;
    std::sort(viol.begin(), viol.end());
    for (std::size_t k = 0; k < std::min<std::size_t>(viol.size(), 32); ++k) active.push_back(viol[k].second);
  }

  const double tol = std::max(curve.tolerance(), 1e-12);
  if (t_star > tol && v.norm() > 0.0) {
    out.witness_direction = v.normalized();
    double margin = std::numeric_limits<double>::infinity();
    for (const auto& x : pts) margin = std::min(margin, out.witness_direction.dot(x));
    out.margin = margin;
    out.contained_in_open_hemisphere = margin > tol;
  }
  out.has_antipodal_pair = !out.contained_in_open_hemisphere;
  if (!out.contained_in_open_hemisphere) out.witness_direction = v.norm() > 0.0 ? Vec3(v.normalized()) : Vec3::Zero();
  return out;
}

double spherical_length(const SphericalCurve& curve) {
  const auto pts = curve.points();
  double s = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) s += arc_angle(pts[i], pts[(i + 1) % pts.size()]);
  return s;
}

namespace {

std::vector<Vec3> distinct_normals(const ConvexPolytope& poly, const std::vector<std::size_t>& faces) {
  std::vector<Vec3> out;
  for (auto f : faces) {
    const Vec3& nf = poly.face_normals()[f];
    bool seen = false;
    for (const auto& m : out) seen = seen || (nf - m).norm() < 1e-9;
    if (!seen) out.push_back(nf);
  }
  return out;
}

Link flat_link(const Vec3& p, const Vec3& normal, std::size_t samples) {
  Link link;
  link.base_point = p;
  link.flat = true;
  link.curve = great_circle(samples, -normal);
  return link;
}

Link wedge_link(const Vec3& p, const Vec3& n1, const Vec3& n2, std::size_t samples) {
  Vec3 axis = n1.cross(n2).normalized();
  Vec3 u1 = axis.cross(n1);
  if (u1.dot(n2) > 0.0) u1 = -u1;
  Vec3 u2 = axis.cross(n2);
  if (u2.dot(n1) > 0.0) u2 = -u2;
  const double theta0 = arc_angle(u1, u2);
  if ((std::cos(theta0) * u1 + std::sin(theta0) * axis.cross(u1) - u2).norm() > 1e-9) axis = -axis;
  Link link;
  link.base_point = p;
  link.curve = wedge_curve(theta0, samples, axis, u1);
  return link;
}

}  // namespace

Link vertex_link(const ConvexPolytope& polytope, std::size_t vertex_id, std::size_t samples) {
  if (vertex_id >= polytope.vertices().size()) throw DomainError("vertex id out of range");
  const Vec3& v = polytope.vertices()[vertex_id];
  const auto ring = polytope.faces_around_vertex(vertex_id);
  const auto normals = distinct_normals(polytope, ring);
  if (normals.size() == 1) return flat_link(v, normals[0], samples);
  if (normals.size() == 2) return wedge_link(v, normals[0], normals[1], samples);

  std::vector<Vec3> corners;
  for (std::size_t k = 0; k < ring.size(); ++k) {
    const std::size_t f = ring[k];
    const std::size_t g = ring[(k + 1) % ring.size()];
    if ((polytope.face_normals()[f] - polytope.face_normals()[g]).norm() < 1e-9) continue;
    const auto& face = polytope.faces()[f];
    const auto pos = static_cast<std::size_t>(std::find(face.begin(), face.end(), vertex_id) - face.begin());
    const Vec3& next = polytope.vertices()[face[(pos + 1) % face.size()]];
    corners.push_back((next - v).normalized());
  }
  const Vec3 inside = (polytope.centroid() - v).normalized();
  double turn = 0.0;
  for (std::size_t k = 0; k < corners.size(); ++k) turn += corners[k].cross(corners[(k + 1) % corners.size()]).dot(inside);
  if (turn < 0.0) std::reverse(corners.begin(), corners.end());

  Link link;
  link.base_point = v;
  link.curve = spherical_polygon(corners, std::max(samples, corners.size()));
  return link;
}

Link surface_point_link(const ConvexPolytope& polytope, const Vec3& p, std::size_t samples) {
  const auto faces = polytope.faces_containing(p);
  if (faces.empty()) throw DomainError("point does not lie on the polytope boundary");
  for (std::size_t v = 0; v < polytope.vertices().size(); ++v) {
    if ((polytope.vertices()[v] - p).norm() < 1e-9 * std::max(1.0, p.norm())) return vertex_link(polytope, v, samples);
  }
  const auto normals = distinct_normals(polytope, faces);
  if (normals.size() == 1) return flat_link(p, normals[0], samples);
  if (normals.size() == 2) return wedge_link(p, normals[0], normals[1], samples);
  throw DomainError("point meets three or more face planes but is not a vertex");
}

Link curve_corner_link(const SphericalCurve& curve, std::size_t index) {
  if (index >= curve.size()) throw DomainError("corner index out of range");
  const Vec3& x = curve[index];
  const auto i = static_cast<std::ptrdiff_t>(index);
  const Vec3 back = tangent_part(curve.wrap(i - 1), x).normalized();
  const Vec3 ahead = tangent_part(curve.wrap(i + 1), x).normalized();
  if ((back - ahead).norm() < 1e-12) throw DomainError("corner directions coincide");
  Link link;
  link.base_point = x;
  link.direction_pair = std::make_pair(back, ahead);
  return link;
}

double link_length(const Link& link) {
  if (!link.curve) throw DomainError("0-dimensional link has no length");
  return link.curve->exact_length().value_or(spherical_length(*link.curve));
}

Density density_from_link(const Link& link) {
  if (link.direction_pair) return {1.0, DensityMethod::link_measure};
  return {link_length(link) / kTwoPi, DensityMethod::link_measure};
}

Classification wedge_or_equator_classify(const SphericalCurve& curve, double tolerance) {
  Classification out;
  const auto pts = curve.points();
  const std::size_t n = pts.size();
  out.length = spherical_length(curve);
  if (std::abs(out.length - kTwoPi) > tolerance * kTwoPi) {
    out.residual = std::abs(out.length - kTwoPi);
    return out;
  }

  Mat3 scatter = Mat3::Zero();
  for (const auto& x : pts) scatter += x * x.transpose();
  Eigen::SelfAdjointEigenSolver<Mat3> es(scatter);
  const Vec3 normal = es.eigenvectors().col(0);
  double res_eq = 0.0;
  for (const auto& x : pts) res_eq = std::max(res_eq, std::abs(normal.dot(x)));
  out.residual = res_eq;
  if (res_eq <= tolerance) {
    out.kind = ShapeClass::Equator;
    return out;
  }

  std::size_t bi = 0;
  std::size_t bj = 0;
  double most = 2.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = pts[i].dot(pts[j]);
      if (d < most) {
        most = d;
        bi = i;
        bj = j;
      }
    }
  if (kPi - arc_angle(pts[bi], pts[bj]) > 1e-4) return out;
  const Vec3 axis = (pts[bi] - pts[bj]).normalized();

  auto fit_half = [&](std::size_t from, std::size_t to, Vec3& u) {
    Vec3 sum = Vec3::Zero();
    std::vector<Vec3> chain;
    for (std::size_t k = (from + 1) % n; k != to; k = (k + 1) % n) {
      chain.push_back(pts[k]);
      sum += tangent_part(pts[k], axis);
    }
    if (chain.empty() || sum.norm() < 1e-12) return std::numeric_limits<double>::infinity();
    u = sum.normalized();
    const Vec3 w = axis.cross(u);
    double res = 0.0;
    for (const auto& x : chain) {
      res = std::max(res, std::abs(x.dot(w)));
      if (tangent_part(x, axis).dot(u) < -tolerance) return std::numeric_limits<double>::infinity();
    }
    return res;
  };
  Vec3 u1;
  Vec3 u2;
  const double r1 = fit_half(bi, bj, u1);
  const double r2 = fit_half(bj, bi, u2);
  const double res_w = std::max(r1, r2);
  if (res_w <= tolerance) {
    const double theta0 = arc_angle(u1, u2);
    if (theta0 > tolerance && theta0 < kPi - tolerance) {
      out.kind = ShapeClass::Wedge;
      out.wedge = WedgeSpec{axis, -axis, theta0};
      out.residual = res_w;
    }
  }
  return out;
}

std::string to_string(ShapeClass c) {
  switch (c) {
    case ShapeClass::Equator:
      return "Equator";
    case ShapeClass::Wedge:
      return "Wedge";
    case ShapeClass::Neither:
      break;
  }
  return "Neither";
}

AreaRatioReport product_cone_area_ratio(const SphericalCurve& theta_curve, std::size_t quadrature_resolution) {
  if (quadrature_resolution < kMinQuadratureResolution)
    throw DomainError("quadrature resolution must be at least " + std::to_string(kMinQuadratureResolution));
  const std::size_t m = quadrature_resolution + (quadrature_resolution % 2);
  const auto pts = theta_curve.points();
  const std::size_t n = pts.size();

  auto simpson_weight = [](std::size_t k, std::size_t panels) {
    if (k == 0 || k == panels) return 1.0;
    return k % 2 == 1 ? 4.0 : 2.0;
  };

  double area = 0.0;
  const double da = kPi / static_cast<double>(m);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3& a = pts[i];
    const Vec3& b = pts[(i + 1) % n];
    const double omega = arc_angle(a, b);
    if (omega == 0.0) continue;
    const double so = std::sin(omega);
    constexpr std::size_t kArcPanels = 2;
    for (std::size_t q = 0; q <= kArcPanels; ++q) {
      const double tau = static_cast<double>(q) / kArcPanels;
      const Vec3 g = (std::sin((1.0 - tau) * omega) * a + std::sin(tau * omega) * b) / so;
      const Vec3 dg = omega * (-std::cos((1.0 - tau) * omega) * a + std::cos(tau * omega) * b) / so;
      const double wq = simpson_weight(q, kArcPanels) / (3.0 * kArcPanels);
      for (std::size_t k = 0; k <= m; ++k) {
        const double alpha = da * static_cast<double>(k);
        Eigen::Vector4d f_alpha;
        f_alpha << -std::sin(alpha), std::cos(alpha) * g;
        Eigen::Vector4d f_tau;
        f_tau << 0.0, std::sin(alpha) * dg;
        const double E = f_alpha.squaredNorm();
        const double G = f_tau.squaredNorm();
        const double F = f_alpha.dot(f_tau);
        const double dA = std::sqrt(std::max(E * G - F * F, 0.0));
        area += wq * simpson_weight(k, m) * da / 3.0 * dA;
      }
    }
  }
  AreaRatioReport out;
  out.lhs_ratio = spherical_length(theta_curve) / kTwoPi;
  out.rhs_ratio = area / (4.0 * kPi);
  out.difference = out.lhs_ratio - out.rhs_ratio;
  return out;
}

AreaComparisonReport area_comparison_check(const SphericalCurve& gamma, const Vec3& corner_point, double tolerance) {
  const auto pts = gamma.points();
  const std::size_t n = pts.size();
  const Vec3 p = corner_point.normalized();
  const double on_tol = std::max(gamma.tolerance(), 1e-12) * 10.0;
  bool on_curve = false;
  for (std::size_t i = 0; i < n && !on_curve; ++i) {
    const Vec3& a = pts[i];
    const Vec3& b = pts[(i + 1) % n];
    if ((a - p).norm() <= on_tol) {
      on_curve = true;
      break;
    }
    const Vec3 m = a.cross(b);
    if (m.norm() == 0.0) continue;
    const Vec3 nrm = m.normalized();
    on_curve = std::abs(nrm.dot(p)) <= on_tol && a.cross(p).dot(nrm) >= -on_tol && p.cross(b).dot(nrm) >= -on_tol &&
               arc_angle(a, p) <= arc_angle(a, b) + on_tol;
  }
  if (!on_curve) throw DomainError("corner point does not lie on the curve");

  AreaComparisonReport out;
  out.lhs = spherical_length(gamma) / kTwoPi;
  out.rhs = 1.0;
  out.splits = wedge_or_equator_classify(gamma, tolerance).kind != ShapeClass::Neither;
  out.inequality_holds = out.lhs <= out.rhs + tolerance;
  out.equality_implies_split = std::abs(out.lhs - out.rhs) > tolerance || out.splits;
  return out;
}

ExtrinsicMeasures extrinsic_measures(const ConvexPolytope& polytope) {
  const auto& verts = polytope.vertices();
  ExtrinsicMeasures out;
  for (std::size_t i = 0; i < verts.size(); ++i)
    for (std::size_t j = i + 1; j < verts.size(); ++j) out.diameter = std::max(out.diameter, (verts[i] - verts[j]).norm());

  const Vec3 c0 = polytope.centroid();
  const auto nf = static_cast<Eigen::Index>(polytope.faces().size());
  Eigen::MatrixXd A(nf, 4);
  Eigen::VectorXd b(nf);
  for (Eigen::Index f = 0; f < nf; ++f) {
    const Vec3& n = polytope.face_normals()[static_cast<std::size_t>(f)];
    A.block(f, 0, 1, 3) = n.transpose();
    A(f, 3) = 1.0;
    b(f) = std::max(0.0, polytope.face_offsets()[static_cast<std::size_t>(f)] - n.dot(c0));
  }
  Eigen::VectorXd c = Eigen::VectorXd::Zero(4);
  c(3) = 1.0;
  const auto lp = detail::maximize_free(c, A, b);
  if (lp.status != detail::LpResult::Status::optimal) throw DegenerateInput("inradius program is unbounded");
  const double scale = std::max(out.diameter, 1e-300);
  if (!(lp.x(3) > 1e-9 * scale)) throw DegenerateInput("polytope has no interior");
  out.inradius = lp.x(3);
  out.incentre = c0 + lp.x.head(3);
  return out;
}

namespace {

double segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  const double tau = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (p - (a + tau * ab)).norm();
}

}  // namespace

ExtrinsicMeasures extrinsic_measures(const AxisymProfile& profile) {
  if (!profile.closed()) throw DegenerateInput("extrinsic measures need a closed profile");
  const auto pts = profile.samples();
  const std::size_t n = pts.size();
  ExtrinsicMeasures out;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j) {
      const double dr = pts[i].x() + pts[j].x();
      const double dz = pts[i].y() - pts[j].y();
      out.diameter = std::max(out.diameter, std::sqrt(dr * dr + dz * dz));
    }
  auto clearance = [&](double z) {
    const Vec2 c(0.0, z);
    double d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < n; ++i) d = std::min(d, segment_distance(c, pts[i], pts[i + 1]));
    return d;
  };
  // Clearance is concave in the height of an axis point of a convex body.
  double lo = std::min(pts.front().y(), pts.back().y());
  double hi = std::max(pts.front().y(), pts.back().y());
  for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, out.diameter); ++it) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    if (clearance(m1) < clearance(m2)) lo = m1;
    else hi = m2;
  }
  const double zc = 0.5 * (lo + hi);
  out.inradius = clearance(zc);
  out.incentre = Vec3(0.0, 0.0, zc);
  if (!(out.inradius > 1e-9 * std::max(out.diameter, 1e-300))) throw DegenerateInput("profile body has no interior");
  return out;
}

}  // namespace imcf::geom
