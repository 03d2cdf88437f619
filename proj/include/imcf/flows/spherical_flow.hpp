#pragma once

#include "imcf/flows/policy.hpp"
#include "imcf/flows/trace.hpp"

#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace imcf::flows {

/// Geodesic curvature at every sample (three-point circumcircle estimator).
std::vector<double> geodesic_curvatures(std::span<const Vec3> pts);

/// Outward unit normals tangent to the sphere (away from the enclosed region).
std::vector<Vec3> spherical_outward_normals(std::span<const Vec3> pts);

/// Uniform-arclength redistribution keeping sample 0 in place, interpolating
/// each gap by blending the circles through its neighbouring sample triples.
std::vector<Vec3> resample_spherical(std::span<const Vec3> pts);

/// Length with the O(h^2) chord deficit removed by extrapolating against the
/// every-other-sample polygon.
double extrapolated_length(std::span<const Vec3> pts);

SphericalState make_spherical_state(const geom::SphericalCurve& curve, double t = 0.0);

/// One step of size dt: samples move along the outward normal by the scheme's
/// displacement, then are redistributed (skipped when redistribution would
/// dent the curve). Throws CurvatureFloor when κ is at the floor and
/// StepRejected when the moved samples are not locally convex.
SphericalState step_spherical_imcf(const SphericalState& state, double dt, const DtPolicy& policy = {});

struct SphericalRunOptions {
  DtPolicy dt;
  double t_end = 0.25;
  /// Snapshot spacing; snapshots land exactly on multiples of it.
  double snapshot_interval = 0.01;
  /// Stop once the length reaches 2π(1 - delta_stop).
  double delta_stop = 1e-3;
  /// Attach the O(N^2) convexity check to every snapshot.
  bool check_convexity = false;
  /// Called with the initial state and after every accepted step, on the
  /// thread running the evolution.
  std::function<void(const SphericalState&)> observer;
};

/// Adaptive evolution with step doubling and local extrapolation.
SphericalTrace evolve_spherical(const geom::SphericalCurve& initial, const SphericalRunOptions& options);

struct EquatorReport {
  double T_observed = 0.0;
  double final_residual = 0.0;
  std::size_t samples_used = 0;
};

/// T from the e^t law fitted with slope 1 over the trace's lengths, and the C^0
/// distance of the last snapshot to its best-fit great circle.
EquatorReport equator_convergence_time(const SphericalTrace& trace);

/// Largest |asin <n, x>| over the samples for the best-fit great circle normal n.
double great_circle_residual(std::span<const Vec3> pts);

}  // namespace imcf::flows
