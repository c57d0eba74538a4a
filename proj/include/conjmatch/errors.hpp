#pragma once

#include <stdexcept>
#include <string>

namespace conjmatch {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : Error {
  using Error::Error;
};
struct DegenerateContour : Error {
  using Error::Error;
};
struct NonManifold : Error {
  using Error::Error;
};
struct NonTriangular : Error {
  using Error::Error;
};
struct DisconnectedMesh : Error {
  using Error::Error;
};
struct DomainError : Error {
  using Error::Error;
};
struct DegenerateFrame : Error {
  using Error::Error;
};
struct MissingRotation : Error {
  using Error::Error;
};
struct NoPath : Error {
  using Error::Error;
};
struct InvalidSplit : Error {
  using Error::Error;
};
struct MissingGroundTruth : Error {
  using Error::Error;
};
struct EmptyTargetSegment : Error {
  using Error::Error;
};
struct EmptyInput : Error {
  using Error::Error;
};
struct DegenerateConfiguration : Error {
  using Error::Error;
};
struct ARAPDiverged : Error {
  using Error::Error;
};

}  // namespace conjmatch
