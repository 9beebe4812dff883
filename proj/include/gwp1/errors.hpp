#pragma once

#include <stdexcept>
#include <string>

namespace gwp1 {

/// Violated precondition of an exact-arithmetic operation (alphabet mismatch,
/// forbidden constant term, exponent overflow, ...).
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// A coefficient was requested below the guaranteed order of a series.
class UnknownCoefficientError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// An operator chain does not have enough precision left to certify a result.
class TruncationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two independent evaluation routes disagreed.
class OracleMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical evaluation outside the region where the integral or saddle exists.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace gwp1
