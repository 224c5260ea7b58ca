#pragma once

#include <stdexcept>
#include <string>

namespace chaoscope {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input data or parameters: unreadable files, invalid values, series
/// too short for the requested reconstruction.
class InputError : public Error {
 public:
  using Error::Error;
};

/// The input was valid but an estimator could not produce a result
/// (no admissible neighbour, no populated box, no admissible pairs, ...).
class EstimationError : public Error {
 public:
  using Error::Error;
};

}  // namespace chaoscope
