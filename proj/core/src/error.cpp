#include "susysep/error.hpp"

namespace susysep {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidParameter: return "InvalidParameter";
    case ErrorKind::NotBound: return "NotBound";
    case ErrorKind::SingularPoint: return "SingularPoint";
    case ErrorKind::MissingDerivative: return "MissingDerivative";
    case ErrorKind::GridTooCoarse: return "GridTooCoarse";
    case ErrorKind::IllConditioned: return "IllConditioned";
    case ErrorKind::DegenerateDiagonal: return "DegenerateDiagonal";
    case ErrorKind::Inadmissible: return "Inadmissible";
    case ErrorKind::NullImage: return "NullImage";
    case ErrorKind::NotSeparable: return "NotSeparable";
    case ErrorKind::SingularNode: return "SingularNode";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::EmptyMask: return "EmptyMask";
    case ErrorKind::UnknownSuite: return "UnknownSuite";
    case ErrorKind::InsufficientLevels: return "InsufficientLevels";
  }
  return "Unknown";
}

}  // namespace susysep
