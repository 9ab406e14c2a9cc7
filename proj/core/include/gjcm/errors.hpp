#pragma once

#include <stdexcept>
#include <string>

namespace gjcm {

// Every failure raised by the library derives from Error so callers can catch
// the whole family in one place (the CLI maps it to a nonzero exit).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed config text. line() is 1-based, 0 when unknown.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line) : Error(what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

// A value breaks a documented invariant. field() names the offending key.
class ValidationError : public Error {
 public:
  ValidationError(std::string field, const std::string& what)
      : Error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class CutoffError : public Error {
 public:
  using Error::Error;
};

// Mixing angles undefined (no coupling and no positive detuning).
class DegeneracyError : public Error {
 public:
  using Error::Error;
};

// q is perpendicular to p: the dressed energy has no curvature in p.
class SingularGeometryError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

// Fixed-step integrator asked to run below its minimum period resolution.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

class InvalidStepError : public Error {
 public:
  using Error::Error;
};

}  // namespace gjcm
