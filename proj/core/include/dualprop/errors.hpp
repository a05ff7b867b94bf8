#pragma once

#include <stdexcept>
#include <string>

namespace dualprop {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A real or dual quantity that must be finite was NaN or infinite.
class NonFiniteError : public Error {
 public:
  using Error::Error;
};

/// Division by a dual number whose real part is (numerically) zero.
/// Such elements are zero-divisors in R[eps]/(eps^2), not units.
class DivisionByNonUnit : public Error {
 public:
  using Error::Error;
};

/// A function was evaluated outside its domain (ln of a non-positive
/// number, overflow of exp, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Vector lengths, layer widths or gradient shapes disagree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// The ones-seeded gradient rule divides by sum(w); raised when that sum
/// is below the guard tolerance.
class SingularSeed : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration values (learning rate, epochs, reps, names).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed or missing input files.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace dualprop
