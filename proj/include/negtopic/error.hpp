#pragma once

#include <stdexcept>
#include <string>

namespace negtopic {

// Usage/config problems map to CLI exit code 1, data problems to exit code 2.
enum class ErrorKind { kConfig, kData };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorKind::kConfig, what) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ErrorKind::kData, what) {}
};

}  // namespace negtopic
