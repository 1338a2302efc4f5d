#ifndef ROUGHCURVE_ERRORS_HPP
#define ROUGHCURVE_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace roughcurve {

// Invalid scalar parameters (s <= 0, sigma <= 0, k < 1, ...).
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Dimension mismatches and malformed containers.
class StructuralError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Input outside the domain of a mapping (e.g. a radius at or below r0).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Non-finite values, overflow, and spectra too small to invert.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SingularSpectrumError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace roughcurve

#endif  // ROUGHCURVE_ERRORS_HPP
