#pragma once

#include "imcf/error.hpp"

#include <cstddef>
#include <vector>

namespace imcf::detail {

/// Solves the tridiagonal system a_i x_{i-1} + b_i x_i + c_i x_{i+1} = d_i
/// (a_0 and c_{n-1} ignored) by the Thomas algorithm.
inline std::vector<double> solve_tridiagonal(std::vector<double> a, std::vector<double> b, std::vector<double> c,
                                             std::vector<double> d) {
  const std::size_t n = b.size();
  if (n == 0) return {};
  for (std::size_t i = 1; i < n; ++i) {
    const double w = a[i] / b[i - 1];
    b[i] -= w * c[i - 1];
    d[i] -= w * d[i - 1];
  }
  std::vector<double> x(n);
  x[n - 1] = d[n - 1] / b[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) x[i] = (d[i] - c[i] * x[i + 1]) / b[i];
  return x;
}

/// Cyclic variant: a_0 couples to x_{n-1} and c_{n-1} to x_0 (Sherman-Morrison).
inline std::vector<double> solve_cyclic_tridiagonal(const std::vector<double>& a, const std::vector<double>& b,
                                                    const std::vector<double>& c, const std::vector<double>& d) {
  const std::size_t n = b.size();
  if (n < 3) throw MalformedInput("cyclic tridiagonal system needs at least 3 unknowns");
  const double alpha = c[n - 1];
  const double beta = a[0];
  const double gamma = -b[0];
  std::vector<double> bb(b);
  bb[0] = b[0] - gamma;
  bb[n - 1] = b[n - 1] - alpha * beta / gamma;
  const auto x = solve_tridiagonal(a, bb, c, d);
  std::vector<double> u(n, 0.0);
  u[0] = gamma;
  u[n - 1] = alpha;
  const auto z = solve_tridiagonal(a, bb, c, u);
  const double fact = (x[0] + beta * x[n - 1] / gamma) / (1.0 + z[0] + beta * z[n - 1] / gamma);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = x[i] - fact * z[i];
  return out;
}

}  // namespace imcf::detail
