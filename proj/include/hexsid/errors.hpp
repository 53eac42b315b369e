#pragma once

#include <stdexcept>
#include <string>

namespace hexsid {

/// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// kinematics
struct OutOfStrokeError : Error {
    using Error::Error;
};
struct NoConvergenceError : Error {
    using Error::Error;
};

// joints
struct GimbalDegenerateError : Error {
    using Error::Error;
};
struct AngleOutOfTableError : Error {
    using Error::Error;
};

// dynamics
struct SingularPoseError : Error {
    using Error::Error;
};

// excitation
struct ZeroSignalError : Error {
    using Error::Error;
};
struct WorkspaceViolationError : Error {
    using Error::Error;
};

// plant
struct FrequencyOutOfTableError : Error {
    using Error::Error;
};

// sysid
struct TooFewPeriodsError : Error {
    using Error::Error;
};
struct RankDeficientWindowError : Error {
    using Error::Error;
};
struct GridMismatchError : Error {
    using Error::Error;
};
struct PhaseUnwrapAmbiguousError : Error {
    using Error::Error;
};
struct SingularFrmError : Error {
    using Error::Error;
};

// handeye
struct DegenerateMotionSetError : Error {
    using Error::Error;
};
struct IllConditionedError : Error {
    using Error::Error;
};

// io / cli
struct FileFormatError : Error {
    using Error::Error;
};

}  // namespace hexsid
