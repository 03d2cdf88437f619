#pragma once

#include "imcf/flows/inner_approximation.hpp"
#include "imcf/flows/spherical_flow.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace imcf::flows {

struct WeakFlowOptions {
  /// Per-member run settings; t_end and the snapshot grid are shared.
  SphericalRunOptions run;
  std::size_t samples = 512;
  /// 1: linear extrapolation in ε through the two finest members.
  /// 2: quadratic through the three finest.
  int richardson_order = 1;
  /// Nesting tolerance; negative selects the grid tolerance of each snapshot.
  double nesting_tolerance = -1.0;
  std::size_t workers = 1;
  /// Per-member observer taking the schedule index; replaces run.observer.
  /// Members running concurrently call it concurrently.
  std::function<void(std::size_t, const SphericalState&)> member_observer;
};

struct NestingCheck {
  double t = 0.0;
  double eps_outer = 0.0;  // smaller ε, larger region
  double eps_inner = 0.0;
  /// Largest sine of the distance by which the inner curve leaves the outer region.
  double violation = 0.0;
  double tolerance = 0.0;
};

struct WeakFlowResult {
  /// One trace per schedule entry, in schedule order.
  std::vector<SphericalTrace> members;
  /// Richardson limit over the common snapshot times.
  SphericalTrace limit;
  std::vector<NestingCheck> nesting;
  /// Centre of the geodesic polar coordinates used for the limit.
  Vec3 centre = Vec3::UnitZ();
  double max_nesting_violation() const;
};

/// Pointwise distance from `centre` to the polygon along the geodesic rays at
/// the azimuths `phi` (measured in the frame orthonormal_complement(centre)).
/// The centre must lie inside the curve.
std::vector<double> radial_function(std::span<const Vec3> pts, const Vec3& centre, std::span<const double> phi);

/// Sine of the largest distance by which `inner` leaves the region bounded by
/// `outer` (0 when contained). Both curves counterclockwise.
double containment_violation(std::span<const Vec3> outer, std::span<const Vec3> inner);

/// Chord deficit bound max h²κ/8 of a sampled curve, plus a floor of 1e-9.
double grid_tolerance(std::span<const Vec3> pts);

/// Weak flow of a convex spherical curve from its inner approximations.
/// Throws DomainError when t_end reaches the equator time of the input,
/// MalformedInput for a bad schedule and SolverInconsistency when two members
/// cross by more than the nesting tolerance.
WeakFlowResult run_weak_flow(const geom::SphericalCurve& initial, const EpsilonSchedule& schedule,
                             const WeakFlowOptions& options);

}  // namespace imcf::flows
