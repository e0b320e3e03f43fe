#pragma once

#include <stdexcept>
#include <string>

namespace hsf {

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error {
  using Error::Error;
};

/// metric_from_phi: the 3-form does not define a positive metric.
struct NonPositiveForm : Error {
  using Error::Error;
};

/// G2 driver: max |g_phi - id| exceeded drift_tol.
struct MetricDrift : Error {
  using Error::Error;
};

struct CflViolation : Error {
  using Error::Error;
};

/// Pre-retraction constraint violation exceeded repair_tol.
struct ConstraintBlowup : Error {
  using Error::Error;
};

struct NonFinite : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

}  // namespace hsf
