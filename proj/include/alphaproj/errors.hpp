#pragma once

#include <stdexcept>
#include <string>

namespace alphaproj {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed input: bad weights, alphabet mismatch, invalid alpha, bad flags.
struct ValidationError : Error {
  using Error::Error;
};

/// A quantity could not be evaluated (e.g. an identity with infinite terms).
struct EvaluationError : Error {
  using Error::Error;
};

}  // namespace alphaproj
