#pragma once

#include <stdexcept>
#include <string>

namespace glb {

/// Bad user-supplied parameters (grid bounds, windows, config files).
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

/// Operands live on incompatible grids.
class DimensionError : public std::runtime_error {
public:
  explicit DimensionError(const std::string& what) : std::runtime_error(what) {}
};

/// An iterative solve exhausted its budget.
class SpectralError : public std::runtime_error {
public:
  SpectralError(const std::string& what, double residual)
      : std::runtime_error(what), residual(residual) {}
  double residual;
};

/// Modulation fit did not converge; carries the last iterate's residual norm.
class FitError : public std::runtime_error {
public:
  FitError(const std::string& what, double residual)
      : std::runtime_error(what), residual(residual) {}
  double residual;
};

class DiagnosticError : public std::runtime_error {
public:
  explicit DiagnosticError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace glb
