#pragma once

#include <stdexcept>
#include <string>

namespace bess {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define BESS_DECLARE_ERROR(Name)        \
  class Name : public Error {           \
   public:                              \
    using Error::Error;                 \
  }

// core-domain
BESS_DECLARE_ERROR(InvalidArgument);
BESS_DECLARE_ERROR(SocBoundViolation);
BESS_DECLARE_ERROR(PowerLimitViolation);

// ingest
BESS_DECLARE_ERROR(ParseError);
BESS_DECLARE_ERROR(CadenceError);
BESS_DECLARE_ERROR(NegativePower);
BESS_DECLARE_ERROR(InvalidSpec);

// tariff / dct
BESS_DECLARE_ERROR(SpanMismatch);
BESS_DECLARE_ERROR(InvalidThreshold);

// forecast
BESS_DECLARE_ERROR(InvalidHorizon);
BESS_DECLARE_ERROR(InsufficientHistory);

// lp / mpc
BESS_DECLARE_ERROR(NumericalBreakdown);
BESS_DECLARE_ERROR(DimensionMismatch);
BESS_DECLARE_ERROR(SolverFailure);

// metrics / sim / cli
BESS_DECLARE_ERROR(ZeroBaseline);
BESS_DECLARE_ERROR(ConfigError);

#undef BESS_DECLARE_ERROR

}  // namespace bess
