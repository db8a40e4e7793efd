#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cbvr {

enum class ErrorKind {
  UnsupportedFormat,
  CorruptImage,
  InvalidDimensions,
  EmptySequence,
  ImageTooNarrow,
  ImageTooSmall,
  DegenerateTexture,
  EmptyHistogram,
  DuplicateFrame,
  DimensionMismatch,
  NoCandidates,
  NoQueries,
  MalformedFeatureString,
  UnknownId,
  EmptyVideo,
  NameRequired,
  EmptyCatalog,
  InvalidArgument,
  Unauthorized,
  Io,
};

std::string_view to_string(ErrorKind kind);

/// Every failure surfaced by the library. The kind drives CLI messages and
/// HTTP status mapping; what() carries the detail.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& detail);

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

}  // namespace cbvr
