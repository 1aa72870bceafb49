#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fqlin {

// Every domain error derives from Error; the CLI maps it to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotAPrimePower : public Error {
 public:
  explicit NotAPrimePower(unsigned long q)
      : Error("not a prime power in [2, 256]: " + std::to_string(q)) {}
};

class DivisionByZero : public Error {
 public:
  DivisionByZero() : Error("inverse of zero field element") {}
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class FieldMismatch : public Error {
 public:
  using Error::Error;
};

class ThetaTooLarge : public Error {
 public:
  ThetaTooLarge(std::size_t theta, std::size_t n)
      : Error("theta - 1 = " + std::to_string(theta - 1) + " exceeds n = " + std::to_string(n)) {}
};

class CoreAssignmentInvalid : public Error {
 public:
  using Error::Error;
};

class NoSolution : public Error {
 public:
  NoSolution() : Error("system has no solution") {}
};

class LengthMismatch : public Error {
 public:
  using Error::Error;
};

class BelowThreshold : public Error {
 public:
  using Error::Error;
};

class OutOfRegime : public Error {
 public:
  using Error::Error;
};

class ComplexityGuard : public Error {
 public:
  using Error::Error;
};

}  // namespace fqlin
