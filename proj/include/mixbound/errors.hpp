#pragma once

#include <stdexcept>
#include <string>

namespace mixbound {

// Base class for every error thrown by the library.  Each concrete condition
// gets its own type so callers (and the CLI) can report failures by name.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define MIXBOUND_DEFINE_ERROR(NAME)                         \
  struct NAME : Error {                                     \
    explicit NAME(const std::string& msg)                   \
        : Error(std::string(#NAME) + ": " + msg) {}         \
  }

// chain construction / validation
MIXBOUND_DEFINE_ERROR(DetailedBalanceViolation);
MIXBOUND_DEFINE_ERROR(NotIrreducible);
MIXBOUND_DEFINE_ERROR(NonPositivePi);

// spectral machinery
MIXBOUND_DEFINE_ERROR(EigensolverFailure);

// semigroup / envelopes
MIXBOUND_DEFINE_ERROR(EmptyGrid);
MIXBOUND_DEFINE_ERROR(NotReachedWithinHorizon);

// functional constants
MIXBOUND_DEFINE_ERROR(ZeroDenominator);
MIXBOUND_DEFINE_ERROR(NotCentered);

// path bounds
MIXBOUND_DEFINE_ERROR(PathMissing);
MIXBOUND_DEFINE_ERROR(ZeroConductanceEdge);
MIXBOUND_DEFINE_ERROR(NonPositiveInput);
MIXBOUND_DEFINE_ERROR(PartitionInvalid);

// model-size and data-volume guards
MIXBOUND_DEFINE_ERROR(CapExceeded);
MIXBOUND_DEFINE_ERROR(EmptyLowSet);
MIXBOUND_DEFINE_ERROR(InsufficientSeeds);

#undef MIXBOUND_DEFINE_ERROR

}  // namespace mixbound
