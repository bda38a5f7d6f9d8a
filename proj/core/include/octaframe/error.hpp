#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace octaframe {

enum class ErrorKind {
  InvalidArgument,
  NonManifold,
  OpenBoundary,
  DegenerateDihedral,
  NotARotation,
  DegenerateTangent,
  DegenerateTet,
  CGDiverged,
  ConflictingConstraint,
  AmbiguousAxis,
  OutsideMesh,
  SeedOutside,
  WedgeMismatch,
  NoBoundaryPath,
  ParseError,
  IndexOutOfRange,
  IoError,
  CountMismatch,
  NonApplicable,
};

std::string_view to_string(ErrorKind kind);

/// Exception type used throughout the library. The kind identifies the
/// failure class so callers (and the CLI exit-code mapping) can branch on it.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace octaframe
