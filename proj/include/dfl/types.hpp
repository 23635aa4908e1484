#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace dfl {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using Index = Eigen::Index;

// Error hierarchy. Callers that only care about "something went wrong"
// catch dfl::Error; the CLI maps the concrete types onto exit codes.

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dimension mismatch or otherwise invalid argument.
class InputError : public Error {
 public:
  using Error::Error;
};

/// SVD / least-squares failure or a residual check that did not pass.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Border draws kept producing a rank-deficient bordered matrix.
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

/// The supplied point does not satisfy the system to the required tolerance.
class NotASolutionError : public Error {
 public:
  NotASolutionError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

/// Well-formed file whose contents disagree with the declared shape.
class SchemaError : public Error {
 public:
  using Error::Error;
};

}  // namespace dfl
