#pragma once

#include <stdexcept>
#include <string>

namespace dimbench {

/// Root of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
 public:
  using Error::Error;
};

class InvalidParameter : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

/// Malformed cell or line in a data file.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Dataset that violates the benchmark's structural requirements.
class InvalidDataset : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

/// Base for failures of an iterative numerical method.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public NumericalError {
 public:
  ConvergenceError(const std::string& what, double residual)
      : NumericalError(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

class CalibrationError : public NumericalError {
 public:
  CalibrationError(const std::string& what, long point)
      : NumericalError(what), point_(point) {}
  long point() const noexcept { return point_; }

 private:
  long point_;
};

class DivergenceError : public NumericalError {
 public:
  DivergenceError(const std::string& what, int iteration, double learning_rate)
      : NumericalError(what), iteration_(iteration), learning_rate_(learning_rate) {}
  int iteration() const noexcept { return iteration_; }
  double learning_rate() const noexcept { return learning_rate_; }

 private:
  int iteration_;
  double learning_rate_;
};

class DegenerateGeometry : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// A quantity whose defining ratio has a zero denominator.
class UndefinedValue : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace dimbench
