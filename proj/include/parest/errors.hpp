#pragma once

#include <stdexcept>
#include <string>

namespace parest {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A requested size exceeds a memory guard (e.g. mesh level).
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// A request the implementation has no rule for (e.g. quadrature degree).
class CapabilityError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the mathematical domain of a function.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Inconsistent array lengths or too few entries.
class SizeError : public Error {
 public:
  using Error::Error;
};

/// Two meshes that do not belong to one nested hierarchy.
class IncompatibleMeshError : public Error {
 public:
  using Error::Error;
};

/// Invalid or inconsistent configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Linear solver failure; carries the relative residual reached.
class NumericError : public Error {
 public:
  NumericError(const std::string& what, double residual)
      : Error(what + " (relative residual " + std::to_string(residual) + ")"),
        residual_(residual) {}

  double residual() const { return residual_; }

 private:
  double residual_;
};

}  // namespace parest
