#pragma once

#include <limits>
#include <stdexcept>
#include <string>

namespace regen {

// Thrown when an input violates a documented precondition.
class ValidationError : public std::invalid_argument {
public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

// beta1 + beta2 - 1 <= 0 (or the l-fold analogue): the sets a.s. do not meet.
class NonIntersectingRegime : public ValidationError {
public:
  explicit NonIntersectingRegime(const std::string& what)
      : ValidationError("non-intersecting regime: " + what) {}
};

namespace detail {

inline void require(bool ok, const std::string& msg) {
  if (!ok) throw ValidationError(msg);
}

inline void require_unit_open(double beta, const char* name) {
  if (!(beta > 0.0 && beta < 1.0))
    throw ValidationError(std::string(name) + " must lie in (0,1), got " + std::to_string(beta));
}

inline void require_positive(double v, const char* name) {
  if (!(v > 0.0) || v == std::numeric_limits<double>::infinity())
    throw ValidationError(std::string(name) + " must be a positive finite number, got " + std::to_string(v));
}

}  // namespace detail
}  // namespace regen
