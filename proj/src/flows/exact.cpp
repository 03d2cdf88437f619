#include "imcf/flows/exact.hpp"

#include "imcf/error.hpp"
#include "imcf/sphere_math.hpp"

#include <cmath>

namespace imcf::flows {

double round_cone_exact(double theta0, double t) {
  if (!(theta0 > 0.0 && theta0 < kPi / 2.0)) throw DomainError("cone angle must lie in (0, pi/2)");
  const double c = std::exp(t) * std::cos(theta0);
  if (c >= 1.0 - 1e-15) throw FlatCone("cone is flat at t = " + std::to_string(cone_flat_time(theta0)));
  return std::acos(c);
}

double cone_flat_time(double theta0) {
  if (!(theta0 > 0.0 && theta0 < kPi / 2.0)) throw DomainError("cone angle must lie in (0, pi/2)");
  return -std::log(std::cos(theta0));
}

double latitude_circle_exact(double alpha0, double t) {
  if (!(alpha0 > 0.0 && alpha0 <= kPi / 2.0)) throw DomainError("colatitude must lie in (0, pi/2]");
  const double s = std::exp(t) * std::sin(alpha0);
  if (s > 1.0 + 1e-15) throw PastEquator("latitude circle reached the equator at t = " +
                                         std::to_string(-std::log(std::sin(alpha0))));
  return std::asin(std::min(s, 1.0));
}

double equator_time(double length) {
  if (!(length > 0.0)) throw DomainError("curve length must be positive");
  return std::log(kTwoPi) - std::log(length);
}

}  // namespace imcf::flows
