#include "octaframe/error.hpp"

namespace octaframe {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NonManifold: return "NonManifold";
    case ErrorKind::OpenBoundary: return "OpenBoundary";
    case ErrorKind::DegenerateDihedral: return "DegenerateDihedral";
    case ErrorKind::NotARotation: return "NotARotation";
    case ErrorKind::DegenerateTangent: return "DegenerateTangent";
    case ErrorKind::DegenerateTet: return "DegenerateTet";
    case ErrorKind::CGDiverged: return "CGDiverged";
    case ErrorKind::ConflictingConstraint: return "ConflictingConstraint";
    case ErrorKind::AmbiguousAxis: return "AmbiguousAxis";
    case ErrorKind::OutsideMesh: return "OutsideMesh";
    case ErrorKind::SeedOutside: return "SeedOutside";
    case ErrorKind::WedgeMismatch: return "WedgeMismatch";
    case ErrorKind::NoBoundaryPath: return "NoBoundaryPath";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::CountMismatch: return "CountMismatch";
    case ErrorKind::NonApplicable: return "NonApplicable";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

}  // namespace octaframe
