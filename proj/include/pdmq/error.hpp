#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pdmq {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Evaluation left the real domain of an expression (log of a non-positive
/// number, arctanh outside (-1, 1), division by zero, non-finite result).
class DomainFault : public Error {
 public:
  using Error::Error;
};

class UnboundParameter : public Error {
 public:
  explicit UnboundParameter(const std::string& name)
      : Error("unbound parameter '" + name + "'"), name_(name) {}
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
};

class QuadratureError : public Error {
 public:
  QuadratureError(const std::string& what, double endpoint)
      : Error(what + " (endpoint " + std::to_string(endpoint) + ")"), endpoint_(endpoint) {}
  double endpoint() const noexcept { return endpoint_; }

 private:
  double endpoint_;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, int index)
      : Error(what + " (index " + std::to_string(index) + ")"), index_(index) {}
  int index() const noexcept { return index_; }

 private:
  int index_;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace pdmq
