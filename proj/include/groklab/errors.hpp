#pragma once

#include <stdexcept>
#include <string>

namespace grok {

// Every failure raised by the library derives from Error so callers (the
// sweep harness in particular) can record a failed cell without aborting.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error { using Error::Error; };
struct NotPositiveDefinite : Error { using Error::Error; };
struct InvalidArgument : Error { using Error::Error; };
struct Divergence : Error { using Error::Error; };
struct NewtonNonConvergence : Error { using Error::Error; };

struct InsufficientUniverse : Error { using Error::Error; };
struct NotPrime : Error { using Error::Error; };
struct InvalidFraction : Error { using Error::Error; };

struct NonPositiveDelta : Error { using Error::Error; };
struct DegenerateDesign : Error { using Error::Error; };
struct ZeroVariance : Error { using Error::Error; };
struct TooFewSamples : Error { using Error::Error; };

struct ConfigInvalid : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

}  // namespace grok
