#pragma once

#include <stdexcept>
#include <string>

namespace antibunch {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidDimension : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// The requested state does not fit in the truncated space.
class TruncationError : public Error {
 public:
  TruncationError(const std::string& what, int recommended_dim)
      : Error(what), recommended_dim_(recommended_dim) {}
  int recommended_dim() const noexcept { return recommended_dim_; }

 private:
  int recommended_dim_;
};

class InvalidState : public Error {
 public:
  using Error::Error;
};

class NonNormalizable : public Error {
 public:
  using Error::Error;
};

/// Parameter outside the domain of an operation or closed-form expression.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Mean photon number below the intensity floor; g2 has no value.
class UndefinedG2 : public Error {
 public:
  UndefinedG2(const std::string& what, double intensity)
      : Error(what), intensity_(intensity) {}
  double intensity() const noexcept { return intensity_; }

 private:
  double intensity_;
};

/// Splitter with R = 0 or R = 1 where a closed form divides by zero.
class DegenerateSplitter : public Error {
 public:
  using Error::Error;
};

class NoUniqueSteadyState : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace antibunch
