#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ghsat {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// A bit vector or assignment had the wrong width for its circuit.
class ShapeError : public Error {
  public:
    using Error::Error;
};

/// A topology reference is dangling or violates topological order.
class TopologyError : public Error {
  public:
    using Error::Error;
};

/// A gate's admissible type domain is empty or otherwise unusable.
class DomainError : public Error {
  public:
    using Error::Error;
};

/// An instance exceeds the size guard of an exhaustive procedure.
class GuardError : public Error {
  public:
    using Error::Error;
};

class ParseError : public Error {
  public:
    ParseError(const std::string& msg, std::size_t line = 0)
        : Error(line ? "line " + std::to_string(line) + ": " + msg : msg), line_(line) {}

    /// 1-based source line, or 0 when not applicable.
    std::size_t line() const { return line_; }

  private:
    std::size_t line_;
};

class OracleError : public Error {
  public:
    using Error::Error;
};

} // namespace ghsat
