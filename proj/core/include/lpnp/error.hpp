#pragma once

#include <stdexcept>
#include <string>

namespace lpnp {

/// Base class for every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter violates a documented precondition (ranges, parity, sizes).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Two images (or an image and an operator) disagree on dimensions.
class DimensionMismatch : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

/// An iterate stopped being finite.
class DivergenceError : public Error {
 public:
  explicit DivergenceError(int iteration, const std::string& what)
      : Error(what), iteration_(iteration) {}

  int iteration() const noexcept { return iteration_; }

 private:
  int iteration_;
};

class IoError : public Error {
 public:
  enum class Kind {
    Open,
    UnsupportedFormat,
    MalformedHeader,
    TruncatedPayload,
    Write,
  };

  IoError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

}  // namespace lpnp
