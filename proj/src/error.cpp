#include "ctmcfresh/error.hpp"

namespace ctmcfresh {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::BadShape: return "BadShape";
    case Errc::NegativeRate: return "NegativeRate";
    case Errc::NotIrreducible: return "NotIrreducible";
    case Errc::NonPositiveRate: return "NonPositiveRate";
    case Errc::SingularSystem: return "SingularSystem";
    case Errc::SingularResolvent: return "SingularResolvent";
    case Errc::NotReversible: return "NotReversible";
    case Errc::EigenFailure: return "EigenFailure";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::BadProximity: return "BadProximity";
    case Errc::PoleViolation: return "PoleViolation";
    case Errc::TooLarge: return "TooLarge";
    case Errc::MissingProximity: return "MissingProximity";
    case Errc::NonPositiveParam: return "NonPositiveParam";
    case Errc::NotConcave: return "NotConcave";
    case Errc::InfeasibleBudget: return "InfeasibleBudget";
    case Errc::NotTwoState: return "NotTwoState";
    case Errc::TooManySources: return "TooManySources";
    case Errc::ZeroIntensity: return "ZeroIntensity";
    case Errc::BadWeight: return "BadWeight";
    case Errc::BadParameters: return "BadParameters";
    case Errc::ConfigParse: return "ConfigParse";
    case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail),
      code_(code) {}

}  // namespace ctmcfresh
