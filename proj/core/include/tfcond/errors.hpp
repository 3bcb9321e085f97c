#pragma once

#include <stdexcept>
#include <string>

namespace tfcond {

// Precondition failures use std::invalid_argument; numerical failures use
// SolverError so callers can tell "bad input" from "did not converge".
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class BoxTooSmallError : public SolverError {
 public:
  using SolverError::SolverError;
};

}  // namespace tfcond
