#pragma once

#include <stdexcept>
#include <string>

namespace polymet {

// Base class for all library errors. Subclasses carry the condition name
// used in CLI diagnostics and test assertions.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

#define POLYMET_DEFINE_ERROR(NAME)                                       \
    class NAME : public Error {                                          \
    public:                                                              \
        explicit NAME(const std::string& msg) : Error(#NAME ": " + msg) {} \
    }

POLYMET_DEFINE_ERROR(InvalidBounds);
POLYMET_DEFINE_ERROR(ResolutionTooSmall);
POLYMET_DEFINE_ERROR(SchemeUnsupported);
POLYMET_DEFINE_ERROR(ChartMismatch);
POLYMET_DEFINE_ERROR(NotSymmetric);
POLYMET_DEFINE_ERROR(SignatureLost);
POLYMET_DEFINE_ERROR(InertiaMismatch);
POLYMET_DEFINE_ERROR(DegenerateBody);
POLYMET_DEFINE_ERROR(SingularMetric);
POLYMET_DEFINE_ERROR(MapsOutsideChart);
POLYMET_DEFINE_ERROR(SingularJacobian);
POLYMET_DEFINE_ERROR(NonPeriodicChart);
POLYMET_DEFINE_ERROR(SolverNonconvergence);
POLYMET_DEFINE_ERROR(StepTooLarge);
POLYMET_DEFINE_ERROR(OddDimension);
POLYMET_DEFINE_ERROR(TruncationTooHigh);
POLYMET_DEFINE_ERROR(EigensolveFailure);
POLYMET_DEFINE_ERROR(KernelGapTooSmall);
POLYMET_DEFINE_ERROR(PotentialNotCoercive);
POLYMET_DEFINE_ERROR(DisconnectedGraph);
POLYMET_DEFINE_ERROR(EmptySamples);
POLYMET_DEFINE_ERROR(UnknownSuite);
POLYMET_DEFINE_ERROR(ConfigInvalid);
POLYMET_DEFINE_ERROR(IoFailure);
POLYMET_DEFINE_ERROR(InvalidArgument);

#undef POLYMET_DEFINE_ERROR

}  // namespace polymet
