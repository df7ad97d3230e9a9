#pragma once

#include <stdexcept>
#include <string>

namespace credaug {

// Base for every error raised by the library. Each subclass maps onto one
// failure category so callers (the harness, the CLI) can decide whether an
// error is fatal or per-scenario.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SchemaError : public Error {
 public:
  using Error::Error;
};

class EmptyDatasetError : public Error {
 public:
  using Error::Error;
};

class StratificationError : public Error {
 public:
  using Error::Error;
};

class DegenerateScaleError : public Error {
 public:
  using Error::Error;
};

class InsufficientNeighborsError : public Error {
 public:
  using Error::Error;
};

class NoBorderlineError : public Error {
 public:
  using Error::Error;
};

class DegenerateClassError : public Error {
 public:
  using Error::Error;
};

class UndefinedMetricError : public Error {
 public:
  using Error::Error;
};

class TrainingError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace credaug
