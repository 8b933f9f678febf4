#pragma once

#include <stdexcept>
#include <string>

namespace owbf {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Image dimensions do not agree, or are unusable for the requested operation.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Invalid filter/noise parameters (non-positive sigma, kernel order cap, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Malformed or unsupported image file.
class FormatError : public Error {
 public:
  using Error::Error;
};

// The shiftable approximation broke down at some pixel.
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, int x, int y)
      : Error(what + " at pixel (" + std::to_string(x) + ", " + std::to_string(y) + ")"),
        x_(x),
        y_(y) {}

  int x() const { return x_; }
  int y() const { return y_; }

 private:
  int x_;
  int y_;
};

}  // namespace owbf
