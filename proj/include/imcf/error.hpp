#pragma once

#include <stdexcept>
#include <string>

namespace imcf {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input that cannot be interpreted at all (too few points, bad file layout).
class MalformedInput : public Error {
 public:
  using Error::Error;
};

/// Input is well formed but outside the domain of the operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Geometry without interior (flat polytope, zero-thickness body).
class DegenerateInput : public Error {
 public:
  using Error::Error;
};

/// A round cone has opened up to a plane.
class FlatCone : public DomainError {
 public:
  using DomainError::DomainError;
};

/// A latitude circle was asked for beyond its equator time.
class PastEquator : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Curvature dropped to the configured floor; the speed 1/H is no longer usable.
class CurvatureFloor : public Error {
 public:
  using Error::Error;
};

/// A proposed time step produced an invalid state (negative radius, lost convexity).
class StepRejected : public Error {
 public:
  using Error::Error;
};

/// Not enough samples in a trace to compute the requested statistic.
class InsufficientData : public Error {
 public:
  using Error::Error;
};

/// Two flows that must stay nested were found crossing.
class SolverInconsistency : public Error {
 public:
  using Error::Error;
};

/// Region descriptor whose perimeter exceeds the great-circle length.
class InvalidRegion : public Error {
 public:
  using Error::Error;
};

/// An estimate was requested on data that do not satisfy its hypotheses.
class PreconditionViolation : public Error {
 public:
  using Error::Error;
};

/// Bad command line or configuration; the message names the offending field.
class UsageError : public Error {
 public:
  using Error::Error;
};

}  // namespace imcf
