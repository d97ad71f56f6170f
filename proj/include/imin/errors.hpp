#pragma once

#include <stdexcept>
#include <string>

namespace imin {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller violated a documented precondition.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file; the message carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(what + " at line " + std::to_string(line)), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// sigma(S) does not exceed |S|, so a reduction ratio is undefined.
class DegenerateDenominator : public Error {
 public:
  using Error::Error;
};

class CorruptFile : public Error {
 public:
  using Error::Error;
};

class VersionMismatch : public Error {
 public:
  using Error::Error;
};

/// Optimisation produced a non-finite loss.
class Diverged : public Error {
 public:
  using Error::Error;
};

/// A selector had no admissible edge left to pick.
class NoCandidate : public Error {
 public:
  using Error::Error;
};

class NotConverged : public Error {
 public:
  NotConverged(const std::string& what, double residual)
      : Error(what + " (residual " + std::to_string(residual) + ")"), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

class TimeLimitExceeded : public Error {
 public:
  using Error::Error;
};

}  // namespace imin
