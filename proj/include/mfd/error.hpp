#pragma once

#include <stdexcept>
#include <string>

namespace mfd {

/// Base class of every error raised by the simulator.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed network file or unknown key.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Well-formed input that violates a semantic rule (duplicate id, bad dimension, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// File could not be read or written.
class IoError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Junctions too close to place interface sections with Ω_high clearance between them.
class InfeasibleDecomposition : public Error {
 public:
  using Error::Error;
};

class SingularSystem : public Error {
 public:
  using Error::Error;
};

/// Imposed flow rate would push the lattice velocity past the low-Mach limit.
class MachViolation : public Error {
 public:
  using Error::Error;
};

/// NaN or non-positive density in a lattice, or coupled values out of bounds.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, long cell, long iteration)
      : Error(what), cell_(cell), iteration_(iteration) {}

  long cell() const { return cell_; }
  long iteration() const { return iteration_; }

 private:
  long cell_;
  long iteration_;
};

}  // namespace mfd
