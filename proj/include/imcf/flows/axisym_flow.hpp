#pragma once

#include "imcf/flows/policy.hpp"
#include "imcf/flows/trace.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace imcf::flows {

/// Principal curvatures, mean curvature and outward normals of a profile.
/// A held tip has H = +inf and no normal motion.
struct ProfileCurvature {
  std::vector<double> k1;  // profile curvature
  std::vector<double> k2;  // rotational curvature n_r / r
  std::vector<double> H;
  std::vector<Vec2> normals;
};

ProfileCurvature profile_curvature(std::span<const Vec2> pts, bool closed, std::optional<std::size_t> tip);
ProfileCurvature profile_curvature(const geom::AxisymProfile& profile);

/// Uniform-arclength redistribution keeping both end samples in place.
std::vector<Vec2> resample_profile(std::span<const Vec2> pts, bool closed, std::optional<std::size_t> tip);

ProfileState make_profile_state(const geom::AxisymProfile& profile, double t = 0.0);

/// One step of size dt. Interior samples and smooth axis points move by the
/// scheme's displacement along the outward normal (axis points along the
/// axis); a held tip stays fixed. Throws CurvatureFloor when H is at the
/// floor and StepRejected when a sample crosses the axis.
ProfileState step_axisym_imcf(const ProfileState& state, double dt, const DtPolicy& policy = {});

/// Opening angle from the base plane at the tip: least-squares slope of z
/// against r over the samples within slant distance `window` of the tip.
/// Requires a profile with a marked tip.
double tip_cone_angle(const geom::AxisymProfile& profile, double window);

/// Replace the samples within `window` of the tip by the convex power law
/// through the tip with the profile's height and slope at the window edge,
/// and clear the tip mark.
geom::AxisymProfile smooth_tip(const geom::AxisymProfile& profile, double window);

enum class TipRelease {
  /// At `release_time`, or at -ln cos θ̂(0) from the initial tip angle.
  predicted,
  /// Once the measured tip angle drops to `release_angle`.
  angle_trigger,
  never,
};

std::string to_string(TipRelease r);
TipRelease tip_release_from_string(const std::string& s);

struct AxisymRunOptions {
  DtPolicy dt;
  double t_end = 0.5;
  double snapshot_interval = 0.01;
  TipRelease release = TipRelease::predicted;
  std::optional<double> release_time;
  double release_angle = 0.1;
  /// Slant window for the tip angle fit.
  double tip_window = 0.02;
  /// Slant window replaced by the power-law fill at release.
  double smooth_window = 0.1;
  /// Called with the initial state and after every accepted step.
  std::function<void(const ProfileState&)> observer;
};

/// Adaptive evolution with step doubling and local extrapolation. Snapshots
/// land on multiples of the snapshot interval; the release time is recorded
/// in the trace.
ProfileTrace evolve_axisym(const geom::AxisymProfile& initial, const AxisymRunOptions& options);

}  // namespace imcf::flows
