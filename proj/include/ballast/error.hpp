#pragma once

#include <stdexcept>
#include <string>

namespace ballast {

// Error categories map one-to-one onto CLI exit codes.
enum class ErrorKind {
  Config = 2,
  Data = 3,
  EmptyResult = 4,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  int exit_code() const noexcept { return static_cast<int>(kind_); }

 private:
  ErrorKind kind_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorKind::Config, what) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ErrorKind::Data, what) {}
};

class EmptyResultError : public Error {
 public:
  explicit EmptyResultError(const std::string& what)
      : Error(ErrorKind::EmptyResult, what) {}
};

}  // namespace ballast
