#pragma once

#include <stdexcept>
#include <string>

namespace metamorph {

/// Base of every error the library raises. Callers that only care about
/// "the pipeline rejected this input" catch this type.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

#define METAMORPH_DEFINE_ERROR(Name)              \
    class Name : public Error {                   \
    public:                                       \
        using Error::Error;                       \
    }

// Ingestion
METAMORPH_DEFINE_ERROR(MalformedCsv);
METAMORPH_DEFINE_ERROR(DuplicateTimestamp);
METAMORPH_DEFINE_ERROR(UnknownColumn);
METAMORPH_DEFINE_ERROR(MalformedConfig);

// Windowing and normalization
METAMORPH_DEFINE_ERROR(InsufficientData);
METAMORPH_DEFINE_ERROR(ZeroRange);
METAMORPH_DEFINE_ERROR(MissingValue);

// Correlation
METAMORPH_DEFINE_ERROR(LengthMismatch);
METAMORPH_DEFINE_ERROR(TooFewPairs);
METAMORPH_DEFINE_ERROR(TargetConstant);

// Forecaster
METAMORPH_DEFINE_ERROR(ShapeMismatch);
METAMORPH_DEFINE_ERROR(MalformedModel);

// Variation baseline
METAMORPH_DEFINE_ERROR(TooFewRuns);
METAMORPH_DEFINE_ERROR(MalformedReport);

// Forecaster relations
METAMORPH_DEFINE_ERROR(SeriesTooShort);
METAMORPH_DEFINE_ERROR(NonPositiveWindow);

// Fault injection
METAMORPH_DEFINE_ERROR(UnknownFault);
METAMORPH_DEFINE_ERROR(CleanBuildFails);

#undef METAMORPH_DEFINE_ERROR

}  // namespace metamorph
