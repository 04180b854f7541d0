#pragma once

#include <stdexcept>
#include <string>

namespace primalign {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// A value violates a documented precondition on its own shape (non-unit
// direction, non-SPD matrix, out-of-range probability, ...).
class InvalidInputError : public Error {
 public:
  explicit InvalidInputError(const std::string& msg) : Error(msg) {}
};

// Requested a distance query outside the eight supported pairings.
class UnsupportedPairError : public Error {
 public:
  explicit UnsupportedPairError(const std::string& msg) : Error(msg) {}
};

// Body construction failed because the inertia matrix is not positive
// definite (collinear or otherwise degenerate mass points).
class SingularInertiaError : public Error {
 public:
  explicit SingularInertiaError(const std::string& msg) : Error(msg) {}
};

// A caller-side contract was violated (e.g. root-finding requested for a
// point inside the ellipsoid, or an intersecting line).
class PreconditionError : public Error {
 public:
  explicit PreconditionError(const std::string& msg) : Error(msg) {}
};

// An iterative numerical procedure failed to converge.
class NumericError : public Error {
 public:
  explicit NumericError(const std::string& msg) : Error(msg) {}
};

// Configuration too symmetric for the requested analysis (repeated or zero
// singular values).
class DegenerateConfigurationError : public Error {
 public:
  explicit DegenerateConfigurationError(const std::string& msg) : Error(msg) {}
};

// Index outside its documented range.
class InvalidIndexError : public Error {
 public:
  explicit InvalidIndexError(const std::string& msg) : Error(msg) {}
};

}  // namespace primalign
