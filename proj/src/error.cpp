#include "cbvr/error.hpp"

namespace cbvr {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorKind::CorruptImage: return "CorruptImage";
    case ErrorKind::InvalidDimensions: return "InvalidDimensions";
    case ErrorKind::EmptySequence: return "EmptySequence";
    case ErrorKind::ImageTooNarrow: return "ImageTooNarrow";
    case ErrorKind::ImageTooSmall: return "ImageTooSmall";
    case ErrorKind::DegenerateTexture: return "DegenerateTexture";
    case ErrorKind::EmptyHistogram: return "EmptyHistogram";
    case ErrorKind::DuplicateFrame: return "DuplicateFrame";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NoCandidates: return "NoCandidates";
    case ErrorKind::NoQueries: return "NoQueries";
    case ErrorKind::MalformedFeatureString: return "MalformedFeatureString";
    case ErrorKind::UnknownId: return "UnknownId";
    case ErrorKind::EmptyVideo: return "EmptyVideo";
    case ErrorKind::NameRequired: return "NameRequired";
    case ErrorKind::EmptyCatalog: return "EmptyCatalog";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Unauthorized: return "Unauthorized";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& detail)
    : std::runtime_error(std::string(to_string(kind)) + ": " + detail), kind_(kind), detail_(detail) {}

}  // namespace cbvr
