#pragma once

#include <stdexcept>
#include <string>

namespace dsris {

/// Raised when an input lies outside the physical or mathematical domain of an
/// operation (non-positive distance, coincident element positions, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised when a caller breaks an interface contract (dimension mismatch,
/// duplicate qubit targets, missing vertex coverage, ...).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

inline void require(bool condition, const std::string& what) {
  if (!condition) throw ContractViolation(what);
}

}  // namespace dsris
