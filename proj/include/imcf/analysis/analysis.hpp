#pragma once

#include "imcf/convex_geom.hpp"
#include "imcf/flows/cone.hpp"
#include "imcf/flows/trace.hpp"
#include "imcf/flows/weak_flow.hpp"
#include "imcf/polytope.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace imcf::analysis {

inline constexpr double kNaN = flows::kNaN;

/// Time scales attached to a convex body or a link.
struct TimeScales {
  /// Equator time ln 2π - ln|Γ| of the worst link.
  double T_gamma = kNaN;
  /// Corner time of a 0-dimensional link (0 under the counting convention).
  double T_theta = 0.0;
  /// sup over singular points of -ln ρ.
  double T_smooth = 0.0;
  /// Maximal time of a non-compact flow; NaN for compact bodies.
  double T_star = kNaN;
  /// 2 (ln L0 - ln r0) from the diameter and inradius.
  double T_bound = kNaN;
  /// Point realizing T_smooth.
  Vec3 worst_point = Vec3::Zero();
};

struct MonitorParams {
  /// Star-shape cone angle: <F, ω> >= sin θ1 |F| is required at every sample.
  double theta1 = 0.3;
  Vec3 omega = Vec3::UnitZ();
  /// Bound the fitted constant is compared against; 0 skips the comparison.
  double fit_C = 0.0;
  /// Check the star-shape condition; when false the series is computed regardless.
  bool enforce_star_shape = true;
};

// ------------------------------------------------------------- waiting times

struct WaitingTimeReport {
  /// First time the distance from p to the geometry exceeds its initial value
  /// by the tolerance, interpolated linearly between snapshots.
  double t_wait = kNaN;
  /// Onset time from the straight line through the two snapshots bracketing
  /// the crossing, extended back to zero displacement.
  double t_onset = kNaN;
  /// No crossing before the end of the trace; t_wait is then the trace end.
  bool censored = false;
  double tolerance = 0.0;
  std::vector<std::pair<double, double>> displacement;  // (t, d(t) - d(0))
};

/// Profile traces; p in the (r, z) half-plane. A negative tolerance selects
/// three times the initial mean sample spacing.
WaitingTimeReport waiting_time(const flows::ProfileTrace& trace, const Vec2& p, double displacement_tol = -1.0);
/// Spherical traces of convex curves. d is the geodesic distance from p to the
/// curve, signed positive when the curve encloses p, and the displacement is
/// measured from max(d(0), 0): a point outside the initial curve waits until
/// it is enclosed by the tolerance.
WaitingTimeReport waiting_time(const flows::SphericalTrace& trace, const Vec3& p, double displacement_tol = -1.0);
/// Weak flows: the signed distances of the two finest members are extrapolated
/// linearly to ε = 0 at every common snapshot before the crossing test. The
/// default tolerance is three times the finest member's mean spacing.
WaitingTimeReport waiting_time(const flows::WeakFlowResult& flow, const Vec3& p, double displacement_tol = -1.0);

// --------------------------------------------------------- time scales

TimeScales smoothing_time(const geom::ConvexPolytope& body);
/// A marked tip contributes -ln cos θ̂ from the fitted tip angle; smooth
/// profiles have T_smooth = 0.
TimeScales smoothing_time(const geom::AxisymProfile& body, double tip_window = 0.02);
/// Cone over a link: T_smooth from the apex density, T_star from the link as
/// blow-down region.
TimeScales smoothing_time(const flows::ConeSurface& cone);

/// Blow-down region of a non-compact surface: a convex curve with interior,
/// or a geodesic arc (empty interior) given by its endpoints.
struct LinkRegion {
  std::optional<geom::SphericalCurve> curve;
  std::optional<std::pair<Vec3, Vec3>> arc;
};

/// ln 2π - ln P with P the perimeter (twice the length for an arc). Throws
/// InvalidRegion when P exceeds 2π.
double maximal_time(const LinkRegion& region);

struct SmoothingBoundReport {
  double T_smooth = 0.0;
  double T_bound = 0.0;
  bool holds = false;
};

SmoothingBoundReport smoothing_bound_check(const geom::ConvexPolytope& body);
SmoothingBoundReport smoothing_bound_check(const geom::AxisymProfile& body);

// --------------------------------------------------------- cone angles

struct ConeAngleSeries {
  std::vector<double> t;
  std::vector<double> theta_fit;
  /// round_cone_exact from the fitted initial angle; NaN past flattening.
  std::vector<double> theta_exact;
  double theta0 = kNaN;
  double max_deviation = 0.0;
  /// Time the comparison stops (tip release or trace end).
  std::optional<double> truncated_at;
  bool defined = true;
};

/// θ̂(t) from the least-squares tip slope over `fit_window`. Over `[t_from,
/// t_to]` the deviation from the exact cone is maximized. A profile without a
/// tip gives an undefined, truncated report.
ConeAngleSeries cone_angle_series(const flows::ProfileTrace& trace, double fit_window, double t_from = 0.0,
                                  double t_to = 1e300);

// ------------------------------------------------------------ monitor

struct MannKendall {
  double S = 0.0;
  double Z = 0.0;
  /// Z above the one-sided 5% point 1.6449.
  bool upward_trend = false;
};

/// One-sided test for an upward trend. Differences below `tie_tol` times the
/// largest |value| count as ties.
MannKendall mann_kendall(const std::vector<double>& series, double tie_tol = 1e-9);

struct CdMonitorReport {
  std::vector<double> t;
  /// sup over samples of 1/(H|F|).
  std::vector<double> sup_ratio;
  /// sup_ratio / (1 + t^{-1/2}).
  std::vector<double> normalized;
  double fit_C = 0.0;
  MannKendall trend;
  bool bounded = false;
  /// Smallest <F,ω>/|F| - sin θ1 over all checked samples.
  double star_margin = 0.0;
};

/// Over the snapshots with t in [t_from, t_to] (t > 0). Throws
/// PreconditionViolation when star shape is enforced and fails.
CdMonitorReport cd_monitor(const flows::ProfileTrace& trace, const MonitorParams& params, double t_from = 0.0,
                           double t_to = 1e300);
CdMonitorReport cd_monitor(const flows::ConeTrace& trace, const MonitorParams& params, double t_from = 0.0,
                           double t_to = 1e300);

// ------------------------------------------------------------ residuals

struct HResidualSeries {
  std::vector<double> t;
  std::vector<double> max_residual;
  std::vector<std::size_t> worst_sample;
  double overall_max = 0.0;
};

/// |∂_t H - div(H^{-2} ∇H) + |A|²/H| at every sample of the interior
/// snapshots, the time derivative taken along the normal line with central
/// differences. Stencils are centred on the snapshots after the first two;
/// the initial snapshot is not on the stepper's sample layout. Throws
/// DomainError for traces with a tip.
///
/// The diffusion term is differenced over `stride` samples; with stride 1 the
/// rounding in the sample positions is amplified by h^-4.
HResidualSeries h_evolution_residual(const flows::ProfileTrace& trace, std::size_t stride = 2);

// ------------------------------------------------------------ splitting

struct SplitReport {
  bool splits = false;
  Vec3 direction = Vec3::Zero();
  double residual = 0.0;
};

/// Every snapshot contains an antipodal pair along a common axis.
SplitReport splitting_check(const flows::SphericalTrace& trace, double tol = 1e-6);
/// Every snapshot is a cylinder about the axis (translation invariant along it).
SplitReport splitting_check(const flows::ProfileTrace& trace, double tol = 1e-6);

}  // namespace imcf::analysis
