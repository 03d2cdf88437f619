#pragma once

#include "imcf/axisym_profile.hpp"
#include "imcf/polytope.hpp"
#include "imcf/spherical_curve.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>

namespace imcf::geom {

struct ConvexityReport {
  bool is_convex = false;
  /// Largest signed violation over the half-space, turning and winding tests.
  double worst_violation = 0.0;
  bool simple = false;
  double tolerance = 0.0;
};

/// Checks that the cone over the curve is convex and that the curve is simple.
ConvexityReport convexity_check(const SphericalCurve& curve);

struct HemisphereReport {
  bool contained_in_open_hemisphere = false;
  Vec3 witness_direction = Vec3::Zero();
  bool has_antipodal_pair = false;
  /// min_j <witness, x_j>.
  double margin = 0.0;
};

/// Finds a direction strictly inside the hemisphere containing the curve, or
/// reports that the curve contains an antipodal pair. Throws DomainError on
/// non-convex input.
HemisphereReport hemisphere_report(const SphericalCurve& curve);

/// Sum of great-circle arc lengths between consecutive samples.
double spherical_length(const SphericalCurve& curve);

/// Tangent-cone link at a point. Exactly one of `curve` (surface point in R^3)
/// or `direction_pair` (corner of a curve on the sphere) is set.
struct Link {
  std::optional<SphericalCurve> curve;
  std::optional<std::pair<Vec3, Vec3>> direction_pair;
  Vec3 base_point = Vec3::Zero();
  /// Tangent cone is a half-space.
  bool flat = false;
};

/// Link of the tangent cone at a polytope vertex, sampled with `samples` points.
Link vertex_link(const ConvexPolytope& polytope, std::size_t vertex_id, std::size_t samples = 384);
/// Link at an arbitrary boundary point (face interior, edge interior or vertex).
Link surface_point_link(const ConvexPolytope& polytope, const Vec3& p, std::size_t samples = 384);
/// 0-dimensional link at sample `index` of a curve on the sphere: the two unit
/// tangent directions toward the neighbouring samples.
Link curve_corner_link(const SphericalCurve& curve, std::size_t index);

/// Length of a curve link, closed form when the curve carries it.
double link_length(const Link& link);

enum class DensityMethod { link_measure, ball_ratio };

struct Density {
  double value = 1.0;
  DensityMethod method = DensityMethod::link_measure;
};

/// rho = |link| / 2 pi for curve links; 1 for 0-dimensional links (counting measure).
Density density_from_link(const Link& link);

/// Source of |B_r(p) ∩ Σ| for a surface Σ.
class SurfaceSampler {
 public:
  virtual ~SurfaceSampler() = default;
  virtual double area_in_ball(const Vec3& p, double r) const = 0;
  /// Largest radius for which the ball about p sees only the local cone geometry.
  virtual double isolation_radius(const Vec3& p) const = 0;
};

/// Exact face-by-face area for polytopes.
class PolytopeSampler final : public SurfaceSampler {
 public:
  explicit PolytopeSampler(const ConvexPolytope& polytope) : polytope_(polytope) {}
  double area_in_ball(const Vec3& p, double r) const override;
  double isolation_radius(const Vec3& p) const override;

 private:
  const ConvexPolytope& polytope_;
};

/// Frustum-by-frustum area for surfaces of revolution; only points on the axis
/// are supported.
class ProfileSampler final : public SurfaceSampler {
 public:
  explicit ProfileSampler(const AxisymProfile& profile) : profile_(profile) {}
  double area_in_ball(const Vec3& p, double r) const override;
  double isolation_radius(const Vec3& p) const override;

 private:
  const AxisymProfile& profile_;
};

/// Extrapolates |B_r ∩ Σ| / (pi r^2) to r -> 0 over strictly decreasing radii.
Density density_ball_ratio(const SurfaceSampler& sampler, const Vec3& p, std::span<const double> radii);

struct WedgeSpec {
  Vec3 axis_positive = Vec3::UnitZ();
  Vec3 axis_negative = -Vec3::UnitZ();
  double dihedral_angle = kPi / 2.0;
};

enum class ShapeClass { Equator, Wedge, Neither };

struct Classification {
  ShapeClass kind = ShapeClass::Neither;
  std::optional<WedgeSpec> wedge;
  /// Fit residual of the accepted model (or of the great-circle fit for Neither).
  double residual = 0.0;
  double length = 0.0;
};

/// Length gate at 2 pi, then great-circle fit, then two-half-circle fit.
Classification wedge_or_equator_classify(const SphericalCurve& curve, double tolerance = 1e-6);

std::string to_string(ShapeClass c);

struct AreaRatioReport {
  double lhs_ratio = 0.0;
  double rhs_ratio = 0.0;
  double difference = 0.0;
};

inline constexpr std::size_t kMinQuadratureResolution = 4;

/// Compares |Θ|/2π with the area ratio of the lifted surface
/// (α, s) -> (cos α, sin α γ(s)) in S^3 against |S^2| = 4π. The α-integral
/// uses composite Simpson with `quadrature_resolution` panels, each sample arc
/// uses Simpson with two panels.
AreaRatioReport product_cone_area_ratio(const SphericalCurve& theta_curve, std::size_t quadrature_resolution);

struct AreaComparisonReport {
  double lhs = 0.0;
  double rhs = 1.0;
  bool splits = false;
  bool inequality_holds = false;
  bool equality_implies_split = false;
};

/// |Γ|/2π against the 0-dimensional link ratio 1 at `corner_point`.
AreaComparisonReport area_comparison_check(const SphericalCurve& gamma, const Vec3& corner_point,
                                           double tolerance = 1e-6);

struct ExtrinsicMeasures {
  double diameter = 0.0;
  double inradius = 0.0;
  Vec3 incentre = Vec3::Zero();
};

/// Diameter from vertex pairs; inradius as the largest ball inside all face
/// half-spaces (linear program). Throws DegenerateInput for flat bodies.
ExtrinsicMeasures extrinsic_measures(const ConvexPolytope& polytope);

/// Same for the body bounded by a closed profile; the incentre lies on the axis.
ExtrinsicMeasures extrinsic_measures(const AxisymProfile& profile);

}  // namespace imcf::geom
