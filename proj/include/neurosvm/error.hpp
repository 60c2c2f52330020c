#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace neurosvm {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Caller-supplied input is invalid (bad flag values, out-of-range attributes, bad labels).
class ValidationError : public Error {
  public:
    using Error::Error;
};

class ParseError : public ValidationError {
  public:
    ParseError(std::size_t line, const std::string &what)
        : ValidationError("line " + std::to_string(line) + ": " + what), line_(line) {}

    [[nodiscard]] std::size_t line() const noexcept { return line_; }

  private:
    std::size_t line_;
};

class NotFoundError : public Error {
  public:
    using Error::Error;
};

class IntegrityError : public Error {
  public:
    using Error::Error;
};

class VersionError : public Error {
  public:
    using Error::Error;
};

/// A numerical procedure failed to converge or diverged.
class SolverError : public Error {
  public:
    SolverError(const std::string &what, std::size_t iterations)
        : Error(what + " (after " + std::to_string(iterations) + " iterations)"), iterations_(iterations) {}

    [[nodiscard]] std::size_t iterations() const noexcept { return iterations_; }

  private:
    std::size_t iterations_;
};

}  // namespace neurosvm
