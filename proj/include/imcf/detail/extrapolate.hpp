#pragma once

#include "imcf/error.hpp"

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace imcf::detail {

/// Value at x = 0 of the interpolating polynomial through (xs[i], ys[i]) (Neville).
inline double neville_at_zero(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.empty()) throw InsufficientData("extrapolation needs matching, nonempty samples");
  std::vector<double> p(ys.begin(), ys.end());
  const std::size_t n = p.size();
  for (std::size_t m = 1; m < n; ++m) {
    for (std::size_t i = 0; i + m < n; ++i) {
      const double denom = xs[i] - xs[i + m];
      if (denom == 0.0) throw DomainError("extrapolation nodes must be distinct");
      p[i] = (xs[i] * p[i + 1] - xs[i + m] * p[i]) / denom;
    }
  }
  return p[0];
}

/// Richardson step for a quantity with leading error c h^order, from values at h and h/ratio.
inline double richardson(double coarse, double fine, double ratio, double order) {
  const double f = std::pow(ratio, order);
  return (f * fine - coarse) / (f - 1.0);
}

}  // namespace imcf::detail
