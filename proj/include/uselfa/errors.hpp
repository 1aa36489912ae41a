#pragma once

#include <stdexcept>
#include <string>

namespace uselfa {

// Root of every error raised by the library. The CLI maps subclasses onto
// its exit-code contract.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Ingestion
class ParseError : public Error {
 public:
  using Error::Error;
};
class SchemaError : public Error {
 public:
  using Error::Error;
};
class DegenerateDataError : public Error {
 public:
  using Error::Error;
};
class ZeroVarianceError : public Error {
 public:
  explicit ZeroVarianceError(const std::string& attribute)
      : Error("attribute '" + attribute + "' has zero variance"), attribute_(attribute) {}
  const std::string& attribute() const noexcept { return attribute_; }

 private:
  std::string attribute_;
};

// Engine
class SingularCorrelationError : public Error {
 public:
  using Error::Error;
};
class NoFactorRetainedError : public Error {
 public:
  using Error::Error;
};
class DimensionMismatchError : public Error {
 public:
  using Error::Error;
};

// Composite / ranges
class IncompleteDefinitionError : public Error {
 public:
  using Error::Error;
};
class AlphaRangeError : public Error {
 public:
  using Error::Error;
};
class KRangeError : public Error {
 public:
  using Error::Error;
};
class GridError : public Error {
 public:
  using Error::Error;
};
class ZeroDenominatorError : public Error {
 public:
  using Error::Error;
};
class LookupError : public Error {
 public:
  using Error::Error;
};

// Run configuration problems (bad keys, bad values, unreadable files).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace uselfa
