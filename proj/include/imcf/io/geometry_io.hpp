#pragma once

#include "imcf/axisym_profile.hpp"
#include "imcf/flows/trace.hpp"
#include "imcf/polytope.hpp"
#include "imcf/spherical_curve.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace imcf::io {

// Curve files:
//   # format imcf-s2-curve
//   # dimension 3
//   # count N
//   x y z corner        (one line per sample, corner 0 or 1)
//
// Profile files:
//   # format imcf-rz-profile
//   # dimension 2
//   # count N
//   # closed 0|1
//   # tip I|none
//   r z
//
// Lines starting with '#' that are not header keys and blank lines are
// ignored. Every reader throws MalformedInput naming the line at fault.

void write_curve(std::ostream& os, const geom::SphericalCurve& curve);
geom::SphericalCurve read_curve(std::istream& is);

void write_profile(std::ostream& os, const geom::AxisymProfile& profile);
geom::AxisymProfile read_profile(std::istream& is);

/// OFF layout: "OFF", then "V F 0", V vertex lines, F face lines "k i1 .. ik".
void write_off(std::ostream& os, const geom::ConvexPolytope& polytope);
geom::ConvexPolytope read_off(std::istream& is);

geom::SphericalCurve load_curve(const std::filesystem::path& path);
geom::AxisymProfile load_profile(const std::filesystem::path& path);
geom::ConvexPolytope load_off(const std::filesystem::path& path);

/// Union of monitor names over the rows, in first-seen order.
std::vector<std::string> monitor_columns(const std::vector<flows::Diagnostics>& rows);

/// CSV with columns step, t, length_or_area, kappa_min, kappa_max, tip_r,
/// tip_z and one column per monitor; 17 significant digits, empty cells for
/// monitors a row does not carry.
void write_trace_csv(std::ostream& os, const std::vector<flows::Diagnostics>& rows);

/// SVG polylines: curves on S^2 in the orthographic view along `view`,
/// profiles in the (r, z) plane mirrored across the axis.
void write_svg(std::ostream& os, const std::vector<geom::SphericalCurve>& curves, const Vec3& view = Vec3::UnitZ());
void write_svg(std::ostream& os, const std::vector<geom::AxisymProfile>& profiles);

/// "%.17g".
std::string format_double(double v);

}  // namespace imcf::io
