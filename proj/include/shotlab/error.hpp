#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace shotlab {

enum class ErrorKind {
    ConfigInvalid,
    MalformedLine,
    NonMonotoneTime,
    EmptyFile,
    FrameDecode,
    TooFewSamples,
    GapTooLarge,
    SessionTooShort,
    LengthMismatch,
    AlphaOutOfRange,
    NoImpactDetected,
    PhaseOutOfBounds,
    RankDeficient,
    NoSuccessfulShots,
    GridMismatch,
    SingleClass,
    InvalidParams,
    Io,
};

std::string_view to_string(ErrorKind kind);

// All pipeline failures are reported through this one exception type. `detail`
// carries the offending field name, line number or index, depending on kind.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string detail = {});

    ErrorKind kind() const noexcept { return kind_; }
    const std::string& detail() const noexcept { return detail_; }

private:
    ErrorKind kind_;
    std::string detail_;
};

} // namespace shotlab
