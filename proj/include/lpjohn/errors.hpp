#pragma once

#include <stdexcept>
#include <string>

namespace lpjohn {

enum class ErrorKind {
  kInvalidInput,  // violated precondition or malformed input document
  kNumerical,     // discretization or iteration could not deliver a trustworthy value
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

class InputError : public Error {
 public:
  explicit InputError(const std::string& what) : Error(ErrorKind::kInvalidInput, what) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what) : Error(ErrorKind::kNumerical, what) {}
};

}  // namespace lpjohn
