#pragma once

#include <stdexcept>
#include <string>

namespace fibrestab {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define FIBRESTAB_DECLARE_ERROR(Name)      \
  class Name : public Error {              \
   public:                                 \
    using Error::Error;                    \
  }

FIBRESTAB_DECLARE_ERROR(CompositeModulus);
FIBRESTAB_DECLARE_ERROR(DegreeOutOfRange);
FIBRESTAB_DECLARE_ERROR(UnknownVertex);
FIBRESTAB_DECLARE_ERROR(UnknownName);
/// A facet list that violates the complex invariants (index range, repeated
/// vertices, non-maximal facets).
FIBRESTAB_DECLARE_ERROR(InvalidComplex);
/// Input that is not well-formed (bad JSON, wrong field types).
FIBRESTAB_DECLARE_ERROR(ParseError);
FIBRESTAB_DECLARE_ERROR(NotASubcomplex);
FIBRESTAB_DECLARE_ERROR(NotACover);
FIBRESTAB_DECLARE_ERROR(NotConnected);
FIBRESTAB_DECLARE_ERROR(DimensionMismatch);
FIBRESTAB_DECLARE_ERROR(NotClosed);
FIBRESTAB_DECLARE_ERROR(NotAManifoldDim);
FIBRESTAB_DECLARE_ERROR(CompatibilityNotVerified);
FIBRESTAB_DECLARE_ERROR(NonFiniteState);
FIBRESTAB_DECLARE_ERROR(NonConvergentSample);

#undef FIBRESTAB_DECLARE_ERROR

}  // namespace fibrestab
