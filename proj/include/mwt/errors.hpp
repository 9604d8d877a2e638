#pragma once

#include <stdexcept>
#include <string>

namespace mwt {

// Every failure raised by the library derives from Error so callers can
// catch the family at once; the concrete type names the violated contract.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define MWT_DEFINE_ERROR(Name)              \
  class Name : public Error {               \
   public:                                  \
    using Error::Error;                     \
  }

MWT_DEFINE_ERROR(DegenerateMatrixError);
MWT_DEFINE_ERROR(SingularityError);
MWT_DEFINE_ERROR(IntegrabilityError);
MWT_DEFINE_ERROR(InvalidArgumentError);
MWT_DEFINE_ERROR(ResolutionError);
MWT_DEFINE_ERROR(OutOfDomainError);
MWT_DEFINE_ERROR(FitError);
MWT_DEFINE_ERROR(CoverageError);
MWT_DEFINE_ERROR(PreconditionError);
MWT_DEFINE_ERROR(FormatError);
MWT_DEFINE_ERROR(ConfigError);

#undef MWT_DEFINE_ERROR

}  // namespace mwt
