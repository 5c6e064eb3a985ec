#pragma once

#include <stdexcept>
#include <string>

namespace bpdl {

/// Base class for every error raised by the library. Each subclass maps to
/// one named failure condition so callers can catch precisely.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define BPDL_DEFINE_ERROR(Name)              \
  class Name : public Error {                \
   public:                                   \
    explicit Name(const std::string& what)   \
        : Error(std::string(#Name ": ") + what) {} \
  }

BPDL_DEFINE_ERROR(NegativeRate);
BPDL_DEFINE_ERROR(EnvelopeViolated);
BPDL_DEFINE_ERROR(BadKernel);
BPDL_DEFINE_ERROR(EmptyPopulation);
BPDL_DEFINE_ERROR(BudgetExceeded);
BPDL_DEFINE_ERROR(IndexStale);
BPDL_DEFINE_ERROR(StepTooLarge);
BPDL_DEFINE_ERROR(PoleAtZero);
BPDL_DEFINE_ERROR(NoConvergence);
BPDL_DEFINE_ERROR(NoSnapshot);
BPDL_DEFINE_ERROR(QuadratureFail);
BPDL_DEFINE_ERROR(BadConfig);
BPDL_DEFINE_ERROR(UnknownExperiment);

#undef BPDL_DEFINE_ERROR

}  // namespace bpdl
