#pragma once

#include <stdexcept>
#include <string>

namespace qtube {

enum class ErrorKind {
  RankDeficient,
  DomainError,
  GridTooCoarse,
  NonPositive,
  OutsideTube,
  Inadmissible,
  Singular,
  IndexError,
  QuadratureNotConverged,
  DimensionError,
  DegenerateSample,
  NoConvergence,
  NotAnnulus,
  ExtrapolationUnstable,
  A2Violated,
  TailDominates,
  NoNegativeQ,
  DegenerateCoupling,
  OutOfBudget,
  ConfigError,
};

const char* to_string(ErrorKind kind) noexcept;

/// Every recoverable numerical failure in the library is reported through this
/// type; `kind()` is what callers (and the certificate verdict logic) switch on.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

}  // namespace qtube
