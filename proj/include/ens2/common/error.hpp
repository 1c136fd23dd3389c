#pragma once

#include <stdexcept>
#include <string>

namespace ens2 {

// Broad failure categories. The CLI maps each to its own exit code.
enum class ErrorKind {
  invalid_argument,  // violated precondition or bad parameter
  config,            // unparseable or inconsistent configuration
  io,                // file could not be opened, read or written
  data,              // malformed or inconsistent input data
  computation,       // numerical failure (singular system, SVD failure, ...)
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what) : Error(ErrorKind::invalid_argument, what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorKind::config, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::io, what) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ErrorKind::data, what) {}
};

class ComputeError : public Error {
 public:
  explicit ComputeError(const std::string& what) : Error(ErrorKind::computation, what) {}
};

}  // namespace ens2
