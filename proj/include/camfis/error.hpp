#pragma once

#include <stdexcept>
#include <string>

namespace camfis {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A matrix that must be symmetric positive definite was not.
class NotPositiveDefinite : public Error {
 public:
  using Error::Error;
};

/// A forward model or potential produced a non-finite value, or a solver broke down.
class ModelError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace camfis
