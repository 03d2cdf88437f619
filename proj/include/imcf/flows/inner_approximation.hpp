#pragma once

#include "imcf/axisym_profile.hpp"
#include "imcf/spherical_curve.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace imcf::flows {

enum class RoundingRule {
  /// Boundary of the outer parallel set at distance ε of the inner parallel
  /// set at distance 2ε: sides move in by ε and corners become arcs of radius ε.
  inner_parallel,
};

std::string to_string(RoundingRule r);
RoundingRule rounding_rule_from_string(const std::string& s);

struct EpsilonSchedule {
  std::vector<double> epsilons;
  RoundingRule rounding_rule = RoundingRule::inner_parallel;

  /// Throws MalformedInput unless the list is nonempty, positive and strictly decreasing.
  void validate() const;

  bool operator==(const EpsilonSchedule&) const = default;
};

/// Smooth strictly convex curve inside `curve` at Hausdorff distance O(ε),
/// sampled with `samples` points (0 keeps the input count). Circles are shrunk
/// exactly; everything else is treated as the spherical polygon through its
/// corners (or through all samples). Throws DomainError when 2ε reaches the
/// inradius and the offset sides collapse.
geom::SphericalCurve inner_approximation(const geom::SphericalCurve& curve, double eps, std::size_t samples = 0,
                                         RoundingRule rule = RoundingRule::inner_parallel);

/// Planar analogue for closed profiles, applied to the profile mirrored across
/// the axis. The result has no tip.
geom::AxisymProfile inner_approximation(const geom::AxisymProfile& profile, double eps, std::size_t samples = 0,
                                        RoundingRule rule = RoundingRule::inner_parallel);

}  // namespace imcf::flows
