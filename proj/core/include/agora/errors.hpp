#pragma once

#include <stdexcept>
#include <string>

namespace agora {

// Base class for all failures raised by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Instance is structurally malformed or violates a required assumption.
struct ValidationError : Error {
  using Error::Error;
};

// A strongly connected component of size one has no self-utility; the
// market provably has no equilibrium.
struct NoEquilibriumError : Error {
  using Error::Error;
};

// The tracked fixed-point error budget was exceeded.
struct PrecisionError : Error {
  using Error::Error;
};

// An internal invariant was violated; indicates a bug, not bad input.
struct InternalError : Error {
  using Error::Error;
};

// The extracted price vector failed the exact min-cut verification.
struct VerificationError : Error {
  using Error::Error;
};

}  // namespace agora
