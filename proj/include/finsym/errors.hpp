#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace finsym {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Evaluation point outside a declared domain, or a field singular there.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Requested derivative order exceeds what a jet carries.
class OrderError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t position, const std::string& message)
      : Error("parse error at " + std::to_string(position) + ": " + message), position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

class UnknownVariableError : public ParseError {
 public:
  UnknownVariableError(std::size_t position, const std::string& name)
      : ParseError(position, "unknown variable '" + name + "'"), name_(name) {}

  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

/// A vector field fell below its nowhere-zero floor.
class ZeroVectorError : public Error {
 public:
  using Error::Error;
};

class SingularChartError : public Error {
 public:
  using Error::Error;
};

/// Forward and inverse chart maps disagree (round trip or chain rule).
class ChartMismatchError : public Error {
 public:
  using Error::Error;
};

class NonPositiveError : public Error {
 public:
  using Error::Error;
};

class NotPositiveDefiniteError : public Error {
 public:
  using Error::Error;
};

class OddDimensionError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatchError : public Error {
 public:
  using Error::Error;
};

class NotRandersError : public Error {
 public:
  using Error::Error;
};

class NotMinkowskianError : public Error {
 public:
  using Error::Error;
};

/// Malformed metric declaration (e.g. non-symmetric Riemannian matrix).
class InvalidMetricError : public Error {
 public:
  using Error::Error;
};

/// Scenario document violates the schema. `path` is a JSON pointer.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& path, const std::string& message)
      : Error(path + ": " + message), path_(path) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace finsym
