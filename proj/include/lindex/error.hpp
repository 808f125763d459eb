#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace lindex {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller broke a documented precondition (dimension mismatch, bad index, ...).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// A dense allocation would exceed the configured memory budget.
class MemoryBudgetExceeded : public Error {
 public:
  MemoryBudgetExceeded(std::uint64_t required, std::uint64_t budget, const std::string& what)
      : Error(what + ": requires " + std::to_string(required) + " bytes, budget is " +
              std::to_string(budget) + " bytes"),
        required_bytes(required),
        budget_bytes(budget) {}

  std::uint64_t required_bytes;
  std::uint64_t budget_bytes;
};

/// Floating-point breakdown: singular systems, non-finite entries.
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

/// Trajectory step too large for the first-order jump scheme.
class StepSizeError : public Error {
 public:
  using Error::Error;
};

/// A pure state lost (numerically) all of its norm.
class DegenerateState : public Error {
 public:
  using Error::Error;
};

inline constexpr std::uint64_t kDefaultMemoryBudget = std::uint64_t{4} << 30;  // 4 GiB

/// Memory budget for dense allocations, in bytes.
struct MemoryBudget {
  std::uint64_t bytes = kDefaultMemoryBudget;

  [[nodiscard]] bool allows(std::uint64_t required) const noexcept { return required <= bytes; }

  void require(std::uint64_t required, const std::string& what) const {
    if (!allows(required)) throw MemoryBudgetExceeded(required, bytes, what);
  }
};

}  // namespace lindex
