#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace a2g {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed input value: bad building, route, parameter set or config.
class InvalidArgument : public Error {
public:
  using Error::Error;
};

/// Roof vertex projection is undefined because the roof is not below the ABS.
class DegenerateProjection : public Error {
public:
  using Error::Error;
};

/// All hull input points are collinear (or fewer than three distinct points).
class DegenerateHull : public Error {
public:
  using Error::Error;
};

/// Boolean overlay failed; carries the index of the input polygon involved.
class GeometryError : public Error {
public:
  GeometryError(const std::string& what, std::size_t polygon_index)
      : Error(what + " (polygon " + std::to_string(polygon_index) + ")"),
        polygon_index_(polygon_index) {}

  std::size_t polygon_index() const noexcept { return polygon_index_; }

private:
  std::size_t polygon_index_;
};

/// Outdoor area is empty, so area ratios are undefined.
class InvalidEnvironment : public Error {
public:
  using Error::Error;
};

/// ITU parameters produce a non-positive street width or are out of range.
class InvalidParameters : public Error {
public:
  using Error::Error;
};

/// Route waypoint or segment enters a building footprint.
class InvalidRoute : public Error {
public:
  using Error::Error;
};

/// Ray-tracing query point lies inside a footprint.
class InvalidQuery : public Error {
public:
  using Error::Error;
};

/// Argument outside the domain of a channel formula.
class DomainError : public Error {
public:
  using Error::Error;
};

}  // namespace a2g
