#pragma once

#include <stdexcept>
#include <string>

namespace mhft {

// Base class for all library errors. Specific types exist so callers and
// tests can catch exactly the failure they expect.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define MHFT_DEFINE_ERROR(NAME)                       \
    struct NAME : Error {                             \
        using Error::Error;                           \
    }

// market_data
MHFT_DEFINE_ERROR(MissingColumn);
MHFT_DEFINE_ERROR(NonMonotonicTimestamps);
MHFT_DEFINE_ERROR(GapInSeries);
MHFT_DEFINE_ERROR(InvalidFrame);
MHFT_DEFINE_ERROR(RangeOutOfBounds);
MHFT_DEFINE_ERROR(InsufficientHistory);

// indicators
MHFT_DEFINE_ERROR(EmptyTraining);

// decomposition
MHFT_DEFINE_ERROR(SeriesTooShort);
MHFT_DEFINE_ERROR(TooFewChunks);

// env
MHFT_DEFINE_ERROR(SteppedAfterDone);

// neural
MHFT_DEFINE_ERROR(ShapeMismatch);
MHFT_DEFINE_ERROR(IndexOutOfRange);
MHFT_DEFINE_ERROR(NonFiniteGradient);

// optimal_q
MHFT_DEFINE_ERROR(SegmentTooShort);
MHFT_DEFINE_ERROR(SegmentTooLong);

// agents
MHFT_DEFINE_ERROR(MissingOptimalQ);
MHFT_DEFINE_ERROR(EmptySubset);
MHFT_DEFINE_ERROR(InvalidEpochs);
MHFT_DEFINE_ERROR(PoolIncomplete);
MHFT_DEFINE_ERROR(EmptySeries);

// memory
MHFT_DEFINE_ERROR(KeyDimMismatch);
MHFT_DEFINE_ERROR(EmptyMemory);

// checkpoint / config / cli
MHFT_DEFINE_ERROR(CheckpointCorrupt);
MHFT_DEFINE_ERROR(ConfigInvalid);
MHFT_DEFINE_ERROR(MissingDependency);
MHFT_DEFINE_ERROR(IoError);

#undef MHFT_DEFINE_ERROR

}  // namespace mhft
