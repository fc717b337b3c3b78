#pragma once

#include <stdexcept>
#include <string>

namespace mimo {

// Base class for all library errors so callers can catch everything at once.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct NotPositiveDefinite : Error {
  using Error::Error;
};
struct NotSymmetric : Error {
  using Error::Error;
};
struct UnsupportedOrder : Error {
  using Error::Error;
};
struct IndexOutOfRange : Error {
  using Error::Error;
};
struct LengthMismatch : Error {
  using Error::Error;
};
struct ZeroNoiseVariance : Error {
  using Error::Error;
};
struct ShapeMismatch : Error {
  using Error::Error;
};
struct NonFiniteMessage : Error {
  using Error::Error;
};
struct TooLarge : Error {
  using Error::Error;
};
struct CorruptFile : Error {
  using Error::Error;
};
struct ArchMismatch : Error {
  using Error::Error;
};
struct BadFractions : Error {
  using Error::Error;
};
struct EmptyDataset : Error {
  using Error::Error;
};
struct IoFailure : Error {
  using Error::Error;
};
struct MissingWeights : Error {
  using Error::Error;
};

}  // namespace mimo
