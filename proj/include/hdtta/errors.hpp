#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hdtta {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

// A statistic was requested over a mask with no true voxels.
class EmptyRegion : public Error {
 public:
  using Error::Error;
};

class GeometryError : public Error {
 public:
  using Error::Error;
};

class NumericalFailure : public Error {
 public:
  NumericalFailure(const std::string& what, std::size_t step)
      : Error(what), step_(step) {}

  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

// Volume file decoding errors. Each failure mode has its own type.
class FormatError : public Error {
 public:
  using Error::Error;
};
class BadMagic : public FormatError {
 public:
  using FormatError::FormatError;
};
class UnsupportedVersion : public FormatError {
 public:
  using FormatError::FormatError;
};
class CrcMismatch : public FormatError {
 public:
  using FormatError::FormatError;
};
class Truncated : public FormatError {
 public:
  using FormatError::FormatError;
};

}  // namespace hdtta
