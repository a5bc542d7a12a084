#pragma once

#include <stdexcept>

namespace cavity_ising {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A model or protocol parameter outside its admissible range.
class InvalidParameter : public Error {
 public:
  using Error::Error;
};

/// The slope of eps(x_a) never changes sign on the scan: no bistable regime.
class NoBistability : public Error {
 public:
  using Error::Error;
};

/// Per-pair norm drift exceeded the integrator budget; retry with a smaller dt.
class IntegrationQualityError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace cavity_ising
