#pragma once

#include <stdexcept>
#include <string>

namespace rrlab {

// Malformed input, violated precondition, or broken structural invariant.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Points of mixed or unsupported dimension.
class DimensionError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// A selection rule returned a label that is not one of its inputs, or a
// rho family went below the pointwise minimum.
class ContractViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An enumeration would exceed its configured budget.
class CapExceeded : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

}  // namespace rrlab
