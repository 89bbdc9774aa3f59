#pragma once

#include <stdexcept>
#include <string>

namespace wildeuler {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: wrong dimension, non-positive density, asymmetric matrix.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class InfeasibleDecomposition : public Error {
 public:
  using Error::Error;
};

class PerturbationFailed : public Error {
 public:
  using Error::Error;
};

class DegenerateSegment : public Error {
 public:
  using Error::Error;
};

class TimeParallelKernel : public Error {
 public:
  using Error::Error;
};

class EmptyGrid : public Error {
 public:
  using Error::Error;
};

class QuadratureUnderresolved : public Error {
 public:
  using Error::Error;
};

class NotStrictSubsolution : public Error {
 public:
  using Error::Error;
};

/// Raised by constructors of constant subsolutions when Q does not exceed p(rho).
class NotStrict : public Error {
 public:
  using Error::Error;
};

class StepFailed : public Error {
 public:
  using Error::Error;
};

}  // namespace wildeuler
