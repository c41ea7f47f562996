#pragma once

#include <stdexcept>
#include <string>

namespace tunnelstat {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameters: grid, packet, barrier, time step or config file.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Two wavefunctions that must share a grid (and time) do not.
class GridMismatch : public Error {
 public:
  using Error::Error;
};

/// Exhaustive enumeration would exceed its assignment budget.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

/// Amplitude reached the periodic box edges.
class BoundaryContamination : public Error {
 public:
  using Error::Error;
};

/// The packets have not cleared the barrier region yet.
class PrematureMeasurement : public Error {
 public:
  using Error::Error;
};

/// The measurement criterion was never met within the step budget.
class MeasurementTimeout : public Error {
 public:
  using Error::Error;
};

/// The target transmission could not be bracketed or reached.
class CalibrationError : public Error {
 public:
  using Error::Error;
};

/// Antisymmetrizing two (nearly) identical states gives a null state.
class PauliDegeneracy : public Error {
 public:
  using Error::Error;
};

/// A computed quantity broke an identity that holds exactly in algebra.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

}  // namespace tunnelstat
