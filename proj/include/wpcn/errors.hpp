#pragma once

#include <stdexcept>
#include <string>

namespace wpcn {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define WPCN_DECLARE_ERROR(Name)          \
  class Name : public Error {             \
   public:                                \
    using Error::Error;                   \
  }

WPCN_DECLARE_ERROR(DomainError);
WPCN_DECLARE_ERROR(ConvergenceError);
WPCN_DECLARE_ERROR(NotPsdError);
WPCN_DECLARE_ERROR(NoRootError);
WPCN_DECLARE_ERROR(NegativeInputError);
WPCN_DECLARE_ERROR(TargetExceedsSaturationError);
WPCN_DECLARE_ERROR(RankDeficientChannelError);
WPCN_DECLARE_ERROR(DegenerateEigenspaceError);
WPCN_DECLARE_ERROR(OptimalityCheckFailedError);
WPCN_DECLARE_ERROR(InfeasibleError);
WPCN_DECLARE_ERROR(ResolutionTooCoarseError);
WPCN_DECLARE_ERROR(ConfigError);

#undef WPCN_DECLARE_ERROR

}  // namespace wpcn
