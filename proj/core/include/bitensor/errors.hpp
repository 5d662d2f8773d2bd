#pragma once

#include <stdexcept>
#include <string>

namespace bitensor {

/// Base for failures of a geometric precondition at a specific point.
class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// det g at or below 1e-12.
class DegenerateMetric : public GeometryError {
 public:
  using GeometryError::GeometryError;
};

/// A sampled metric failed the leading-minor test.
class NotPositiveDefinite : public GeometryError {
 public:
  using GeometryError::GeometryError;
};

/// A point (or its image under a map) lies outside the declared domain.
class DomainViolation : public GeometryError {
 public:
  using GeometryError::GeometryError;
};

/// The embedding Jacobian lost rank, or the declared metric is not the induced one.
class ImmersionFailure : public GeometryError {
 public:
  using GeometryError::GeometryError;
};

/// Gram-Schmidt pivot below threshold while building a tangent frame.
class FrameDegeneracy : public GeometryError {
 public:
  using GeometryError::GeometryError;
};

/// An operation was called on an object of the wrong dimension.
class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace bitensor
