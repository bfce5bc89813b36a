#pragma once

#include <stdexcept>
#include <string>

namespace supq {

// Base for all conditions detected at runtime by the library itself.
// Precondition violations on user input throw std::invalid_argument instead.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Shape mismatch between operands.
class DimensionError : public Error {
public:
  using Error::Error;
};

// A pivot fell below the singularity threshold.
class SingularError : public Error {
public:
  using Error::Error;
};

// An iteration failed to converge within its budget.
class ConvergenceError : public Error {
public:
  using Error::Error;
};

// A matrix failed group-membership certification.
class NotInGroupError : public Error {
public:
  using Error::Error;
};

// An integrand failed the symmetry spot-check.
class SymmetryError : public Error {
public:
  using Error::Error;
};

// A threshold scan could not certify a side of 1/2 at the precision cap.
class UndecidedError : public Error {
public:
  using Error::Error;
};

// An enumeration exceeded its candidate cap.
class CapError : public Error {
public:
  using Error::Error;
};

} // namespace supq
