#pragma once

#include <stdexcept>
#include <string>

namespace afshar {

// Invalid physical input (negative wavelength, probability outside [0,1], ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Grating period disagrees with the setup interfringe.
class GeometryMismatch : public DomainError {
 public:
  using DomainError::DomainError;
};

// Numeric oracle asked to run with too coarse a sampling.
class ResolutionError : public DomainError {
 public:
  using DomainError::DomainError;
};

class FitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An estimator was fed data carrying no information (e.g. zero counts).
class DegenerateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed configuration text or unit string. Maps to the usage exit code.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace afshar
