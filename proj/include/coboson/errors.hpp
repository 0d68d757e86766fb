#pragma once

#include <stdexcept>
#include <string>

namespace coboson {

// Error categories shared by the C++ core, the C API status codes and the
// CLI exit codes.
enum class ErrorKind {
  parse,       // malformed input document or argument
  validation,  // well-formed input that violates a documented constraint
  domain,      // numerical precondition violated at evaluation time
  accuracy,    // a convergence / accuracy check failed
  io,          // file could not be read or written
};

const char* error_kind_name(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error(ErrorKind::parse, what) {}
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what)
      : Error(ErrorKind::validation, what) {}
};

class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(ErrorKind::domain, what) {}
};

class AccuracyError : public Error {
 public:
  explicit AccuracyError(const std::string& what)
      : Error(ErrorKind::accuracy, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::io, what) {}
};

}  // namespace coboson
