#pragma once

namespace imcf::flows {

/// Round cone {x3 = tan(theta) |x'|} under the flow: theta(t) = acos(e^t cos theta0).
/// Throws FlatCone once the cone has opened to a plane.
double round_cone_exact(double theta0, double t);

/// Time at which the round cone of angle theta0 becomes flat: -ln cos theta0.
double cone_flat_time(double theta0);

/// Colatitude of a latitude circle: alpha(t) = asin(e^t sin alpha0).
/// Throws PastEquator beyond -ln sin alpha0.
double latitude_circle_exact(double alpha0, double t);

/// Time for a closed curve of the given length on S^2 to reach the equator: ln 2 pi - ln length.
double equator_time(double length);

}  // namespace imcf::flows
