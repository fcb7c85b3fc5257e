#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ctmcfresh {

/// Failure categories reported by the library. The enumerator name is the
/// stable identifier printed by the CLI.
enum class Errc {
  BadShape,
  NegativeRate,
  NotIrreducible,
  NonPositiveRate,
  SingularSystem,
  SingularResolvent,
  NotReversible,
  EigenFailure,
  DimensionMismatch,
  BadProximity,
  PoleViolation,
  TooLarge,
  MissingProximity,
  NonPositiveParam,
  NotConcave,
  InfeasibleBudget,
  NotTwoState,
  TooManySources,
  ZeroIntensity,
  BadWeight,
  BadParameters,
  ConfigParse,
  IoError,
};

std::string_view to_string(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& detail);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace ctmcfresh
