#include "imcf/flows/inner_approximation.hpp"

#include "imcf/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace imcf::flows {

using geom::AxisymProfile;
using geom::SphericalCurve;

std::string to_string(RoundingRule r) {
  switch (r) {
    case RoundingRule::inner_parallel:
      return "inner_parallel";
  }
  return "unknown";
}

RoundingRule rounding_rule_from_string(const std::string& s) {
  if (s == "inner_parallel") return RoundingRule::inner_parallel;
  throw MalformedInput("unknown rounding rule '" + s + "'");
}

void EpsilonSchedule::validate() const {
  if (epsilons.empty()) throw MalformedInput("epsilon schedule is empty");
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    if (!(epsilons[i] > 0.0) || !std::isfinite(epsilons[i]))
      throw MalformedInput("epsilon schedule entries must be positive and finite");
    if (i > 0 && !(epsilons[i] < epsilons[i - 1]))
      throw MalformedInput("epsilon schedule must be strictly decreasing");
  }
}

namespace {

// ---------------------------------------------------------------- sphere

struct SpherePiece {
  bool fillet = false;
  Vec3 centre;  // w (fillet) or side normal n
  Vec3 e1, e2;  // start direction and its quarter turn about the centre
  double radius_cos = 0.0;  // component along the centre
  double radius_sin = 0.0;  // radius of the circle in R^3
  double angle = 0.0;
  double length() const { return angle * radius_sin; }
  Vec3 at(double s) const {
    const double a = radius_sin > 0.0 ? s / radius_sin : 0.0;
    return (radius_cos * centre + radius_sin * (std::cos(a) * e1 + std::sin(a) * e2)).normalized();
  }
};

double signed_angle(const Vec3& a, const Vec3& b, const Vec3& axis) {
  return std::atan2(a.cross(b).dot(axis), a.dot(b));
}

// Point on <n1,x> = <n2,x> = s on the side of n1 x n2.
std::optional<Vec3> offset_corner(const Vec3& n1, const Vec3& n2, double s) {
  const Vec3 cr = n1.cross(n2);
  const double crn = cr.norm();
  if (crn < 1e-14) return std::nullopt;
  const double g = n1.dot(n2);
  const double a = s / (1.0 + g);
  const double gg = 1.0 - 2.0 * a * a * (1.0 + g);
  if (gg <= 0.0) return std::nullopt;
  return (a * (n1 + n2) + std::sqrt(gg) * cr / crn).normalized();
}

SphericalCurve sample_pieces(const std::vector<SpherePiece>& pieces, std::size_t n) {
  std::vector<double> cum(pieces.size() + 1, 0.0);
  for (std::size_t i = 0; i < pieces.size(); ++i) cum[i + 1] = cum[i] + pieces[i].length();
  const double total = cum.back();
  std::vector<Vec3> pts;
  pts.reserve(n);
  std::size_t p = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const double s = total * static_cast<double>(k) / static_cast<double>(n);
    while (p + 1 < pieces.size() && cum[p + 1] <= s) ++p;
    pts.push_back(pieces[p].at(s - cum[p]));
  }
  SphericalCurve out(std::move(pts));
  out.with_exact_length(total);
  return out;
}

std::optional<double> circle_colatitude(std::span<const Vec3> pts, Vec3& pole) {
  Vec3 c = Vec3::Zero();
  for (const auto& p : pts) c += p;
  if (c.norm() < 1e-12) return std::nullopt;
  c.normalize();
  double lo = 2.0, hi = -2.0;
  for (const auto& p : pts) {
    lo = std::min(lo, p.dot(c));
    hi = std::max(hi, p.dot(c));
  }
  if (hi - lo > 1e-10) return std::nullopt;
  pole = c;
  return std::acos(std::clamp(0.5 * (lo + hi), -1.0, 1.0));
}

}  // namespace

SphericalCurve inner_approximation(const SphericalCurve& curve, double eps, std::size_t samples, RoundingRule rule) {
  (void)rule;
  if (!(eps > 0.0)) throw DomainError("inner approximation needs eps > 0");
  if (curve.size() < 3) throw MalformedInput("inner approximation needs at least 3 samples");
  const std::size_t n = samples ? samples : curve.size();

  if (curve.polygon_corners().empty()) {
    Vec3 pole;
    if (auto alpha = circle_colatitude(curve.points(), pole)) {
      if (2.0 * eps >= *alpha) throw DomainError("eps exceeds half the inradius of the circle");
      // Keep the phase of sample 0 and the orientation of the input.
      const Vec3 x0 = tangent_part(curve[0], pole).normalized();
      const double orient = (curve[0].cross(curve[1])).dot(pole) > 0.0 ? 1.0 : -1.0;
      const Vec3 y0 = orient * pole.cross(x0);
      const double a = *alpha - eps;
      std::vector<Vec3> pts;
      pts.reserve(n);
      for (std::size_t k = 0; k < n; ++k) {
        const double phi = kTwoPi * static_cast<double>(k) / static_cast<double>(n);
        pts.push_back((std::cos(a) * pole + std::sin(a) * (std::cos(phi) * x0 + std::sin(phi) * y0)).normalized());
      }
      SphericalCurve out(std::move(pts));
      out.with_exact_length(kTwoPi * std::sin(a));
      return out;
    }
  }

  std::vector<Vec3> corners(curve.polygon_corners().begin(), curve.polygon_corners().end());
  if (corners.empty()) corners.assign(curve.points().begin(), curve.points().end());
  {
    Vec3 c = Vec3::Zero();
    for (const auto& p : corners) c += p;
    double turn = 0.0;
    for (std::size_t i = 0; i < corners.size(); ++i) turn += corners[i].cross(corners[(i + 1) % corners.size()]).dot(c);
    if (turn < 0.0) std::reverse(corners.begin(), corners.end());
  }

  // Side normals, dropping corners where consecutive sides are collinear.
  std::vector<Vec3> normals;
  {
    const std::size_t m = corners.size();
    std::vector<Vec3> raw(m);
    for (std::size_t i = 0; i < m; ++i) raw[i] = corners[i].cross(corners[(i + 1) % m]).normalized();
    for (std::size_t i = 0; i < m; ++i) {
      const Vec3& prev = raw[(i + m - 1) % m];
      if (prev.cross(raw[i]).norm() < 1e-9 && prev.dot(raw[i]) > 0.0) continue;
      normals.push_back(raw[i]);
    }
  }
  if (normals.size() < 3) throw DomainError("inner approximation needs a polygon with at least 3 sides");
  const std::vector<Vec3> all_normals = normals;

  const double s2 = std::sin(2.0 * eps);
  std::vector<Vec3> w;
  for (;;) {
    const std::size_t m = normals.size();
    if (m < 3) throw DomainError("eps too large: offset sides collapse");
    w.assign(m, Vec3::Zero());
    bool ok = true;
    for (std::size_t k = 0; k < m && ok; ++k) {
      auto c = offset_corner(normals[(k + m - 1) % m], normals[k], s2);
      if (!c) ok = false;
      else w[k] = *c;
    }
    if (!ok) throw DomainError("eps too large: offset sides do not meet");
    std::size_t worst = m;
    double worst_val = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      const double v = w[k].cross(w[(k + 1) % m]).dot(normals[k]);
      if (v <= 0.0 && (worst == m || v < worst_val)) {
        worst_val = v;
        worst = k;
      }
    }
    if (worst == m) break;
    normals.erase(normals.begin() + static_cast<std::ptrdiff_t>(worst));
  }
  for (const auto& c : w)
    for (const auto& nn : all_normals)
      if (nn.dot(c) < s2 - 1e-10) throw DomainError("eps too large: offset region is empty");

  const std::size_t m = normals.size();
  const double se = std::sin(eps);
  const double ce = std::cos(eps);
  auto tangent_dir = [](const Vec3& wk, const Vec3& nn) { return (nn.dot(wk) * wk - nn).normalized(); };
  std::vector<SpherePiece> pieces;
  pieces.reserve(2 * m);
  for (std::size_t k = 0; k < m; ++k) {
    const Vec3& np = normals[(k + m - 1) % m];
    const Vec3& nk = normals[k];
    const Vec3 up = tangent_dir(w[k], np);
    const Vec3 uk = tangent_dir(w[k], nk);
    SpherePiece f;
    f.fillet = true;
    f.centre = w[k];
    f.e1 = up;
    f.e2 = w[k].cross(up);
    f.radius_cos = ce;
    f.radius_sin = se;
    f.angle = std::max(0.0, signed_angle(up, uk, w[k]));
    pieces.push_back(f);

    const Vec3 a = ce * w[k] + se * uk;
    const Vec3& wn = w[(k + 1) % m];
    const Vec3 b = ce * wn + se * tangent_dir(wn, nk);
    SpherePiece s;
    s.centre = nk;
    s.e1 = tangent_part(a, nk).normalized();
    s.e2 = nk.cross(s.e1);
    s.radius_cos = se;
    s.radius_sin = ce;
    double ang = signed_angle(s.e1, tangent_part(b, nk).normalized(), nk);
    if (ang < 0.0) ang = 0.0;
    s.angle = ang;
    pieces.push_back(s);
  }
  return sample_pieces(pieces, n);
}

// ---------------------------------------------------------------- plane

namespace {

struct PlanePiece {
  bool fillet = false;
  Vec2 origin;  // fillet centre, or side start
  Vec2 dir;     // fillet start direction, or side unit tangent
  double radius = 0.0;
  double len = 0.0;
  Vec2 at(double s) const {
    if (!fillet) return origin + s * dir;
    const double a = s / radius;
    const Vec2 perp(-dir.y(), dir.x());
    return origin + radius * (std::cos(a) * dir + std::sin(a) * perp);
  }
};

}  // namespace

AxisymProfile inner_approximation(const AxisymProfile& profile, double eps, std::size_t samples, RoundingRule rule) {
  (void)rule;
  if (!(eps > 0.0)) throw DomainError("inner approximation needs eps > 0");
  if (!profile.closed()) throw DomainError("inner approximation needs a closed profile");
  const std::size_t np = profile.size();
  if (np < 3) throw MalformedInput("inner approximation needs at least 3 profile samples");
  const std::size_t n = samples ? samples : np;

  std::vector<Vec2> poly;
  for (std::size_t i = 0; i < np; ++i) poly.push_back(profile[i]);
  for (std::size_t i = np - 2; i >= 1; --i) poly.emplace_back(-profile[i].x(), profile[i].y());

  std::vector<Vec2> tangents, starts;
  {
    const std::size_t m = poly.size();
    std::vector<Vec2> raw(m);
    for (std::size_t i = 0; i < m; ++i) raw[i] = (poly[(i + 1) % m] - poly[i]).normalized();
    for (std::size_t i = 0; i < m; ++i) {
      const Vec2& prev = raw[(i + m - 1) % m];
      if (std::abs(cross2(prev, raw[i])) < 1e-12 && prev.dot(raw[i]) > 0.0) continue;
      tangents.push_back(raw[i]);
      starts.push_back(poly[i]);
    }
  }
  if (tangents.size() < 3) throw DomainError("inner approximation needs a polygon with at least 3 sides");
  auto inward = [](const Vec2& t) { return Vec2(-t.y(), t.x()); };
  std::vector<double> offsets(tangents.size());
  for (std::size_t i = 0; i < tangents.size(); ++i) offsets[i] = inward(tangents[i]).dot(starts[i]);
  const auto all_t = tangents;
  const auto all_d = offsets;

  std::vector<Vec2> w;
  for (;;) {
    const std::size_t m = tangents.size();
    if (m < 3) throw DomainError("eps too large: offset sides collapse");
    w.assign(m, Vec2::Zero());
    for (std::size_t k = 0; k < m; ++k) {
      const std::size_t p = (k + m - 1) % m;
      const Vec2 a = inward(tangents[p]);
      const Vec2 b = inward(tangents[k]);
      const double det = cross2(a, b);
      if (std::abs(det) < 1e-14) throw DomainError("eps too large: offset sides do not meet");
      const double da = offsets[p] + 2.0 * eps;
      const double db = offsets[k] + 2.0 * eps;
      w[k] = Vec2((da * b.y() - db * a.y()) / det, (a.x() * db - b.x() * da) / det);
    }
    std::size_t worst = m;
    double worst_val = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      const double v = tangents[k].dot(w[(k + 1) % m] - w[k]);
      if (v <= 0.0 && (worst == m || v < worst_val)) {
        worst_val = v;
        worst = k;
      }
    }
    if (worst == m) break;
    tangents.erase(tangents.begin() + static_cast<std::ptrdiff_t>(worst));
    offsets.erase(offsets.begin() + static_cast<std::ptrdiff_t>(worst));
  }
  for (const auto& c : w)
    for (std::size_t j = 0; j < all_t.size(); ++j)
      if (inward(all_t[j]).dot(c) < all_d[j] + 2.0 * eps - 1e-10)
        throw DomainError("eps too large: offset region is empty");

  const std::size_t m = tangents.size();
  std::vector<PlanePiece> pieces;
  for (std::size_t k = 0; k < m; ++k) {
    const Vec2 up = -inward(tangents[(k + m - 1) % m]);
    const Vec2 uk = -inward(tangents[k]);
    PlanePiece f;
    f.fillet = true;
    f.origin = w[k];
    f.dir = up;
    f.radius = eps;
    f.len = eps * std::max(0.0, std::atan2(cross2(up, uk), up.dot(uk)));
    pieces.push_back(f);
    PlanePiece s;
    s.origin = w[k] + eps * uk;
    s.dir = tangents[k];
    s.len = std::max(0.0, tangents[k].dot(w[(k + 1) % m] - w[k]));
    pieces.push_back(s);
  }
  std::vector<double> cum(pieces.size() + 1, 0.0);
  for (std::size_t i = 0; i < pieces.size(); ++i) cum[i + 1] = cum[i] + pieces[i].len;
  const double total = cum.back();
  auto eval = [&](double s) {
    s = std::fmod(s, total);
    if (s < 0.0) s += total;
    const auto it = std::upper_bound(cum.begin(), cum.end(), s);
    const std::size_t p = std::min<std::size_t>(static_cast<std::size_t>(it - cum.begin()) - 1, pieces.size() - 1);
    return pieces[p].at(s - cum[p]);
  };

  // Axis crossings: x goes - to + at the bottom and + to - at the top.
  const std::size_t scan = 64 * n;
  auto refine = [&](double a, double b) {
    for (int it = 0; it < 200 && b - a > 1e-15 * total; ++it) {
      const double mid = 0.5 * (a + b);
      if ((eval(mid).x() > 0.0) == (eval(b).x() > 0.0)) b = mid;
      else a = mid;
    }
    return 0.5 * (a + b);
  };
  double s_bottom = -1.0, s_top = -1.0;
  for (std::size_t i = 0; i < scan; ++i) {
    const double a = total * static_cast<double>(i) / static_cast<double>(scan);
    const double b = total * static_cast<double>(i + 1) / static_cast<double>(scan);
    const double xa = eval(a).x(), xb = eval(b).x();
    if (xa <= 0.0 && xb > 0.0 && s_bottom < 0.0) s_bottom = refine(a, b);
    if (xa > 0.0 && xb <= 0.0 && s_top < 0.0) s_top = refine(a, b);
  }
  if (s_bottom < 0.0 || s_top < 0.0) throw DomainError("inner approximation does not meet the axis");
  if (s_top < s_bottom) s_top += total;

  std::vector<Vec2> out;
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double s = s_bottom + (s_top - s_bottom) * static_cast<double>(k) / static_cast<double>(n - 1);
    Vec2 p = eval(s);
    if (k == 0 || k + 1 == n) p.x() = 0.0;
    p.x() = std::max(p.x(), 0.0);
    out.push_back(p);
  }
  return AxisymProfile(std::move(out), true);
}

}  // namespace imcf::flows
