#pragma once

#include <stdexcept>
#include <string>

namespace cuspedge {

/// Base of every error thrown by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Input errors: the request itself is malformed or outside the supported regime.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};
class InsufficientSamples : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};
class InsufficientData : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};
class OutsideRegime : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};
class GridMismatch : public InvalidArgument {
 public:
  using InvalidArgument::InvalidArgument;
};

// Numerical errors: the request was valid but the computation could not be certified.
class NumericalFailure : public Error {
 public:
  using Error::Error;
};
class MeshTooCoarse : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};
class IndexIncomplete : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};
class ScheduleInverted : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

}  // namespace cuspedge
