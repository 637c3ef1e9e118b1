#pragma once

#include <stdexcept>
#include <string>

namespace mfdfa {

// Numeric values are part of the C ABI (see mfdfa.h); append only.
enum class ErrorCode : int {
    Ok = 0,
    InvalidArgument = 1,
    Format = 2,
    UnsupportedCodec = 3,
    EmptySignal = 4,
    Bounds = 5,
    InsufficientAudio = 6,
    Data = 7,
    DegenerateSegment = 8,
    InsufficientScales = 9,
    NonConcaveSpectrum = 10,
    InsufficientSpectrum = 11,
    Config = 12,
    Schema = 13,
    ManifestParse = 14,
    DuplicateEntry = 15,
    MissingFile = 16,
    Io = 17,
    RenditionFailed = 18,
    Internal = 19,
};

const char* error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

// Raised when a zero-variance segment makes negative-q moments diverge.
class DegenerateSegmentError : public Error {
public:
    DegenerateSegmentError(std::size_t scale, std::size_t segment, const std::string& message)
        : Error(ErrorCode::DegenerateSegment, message), scale_(scale), segment_(segment) {}

    std::size_t scale() const noexcept { return scale_; }
    std::size_t segment() const noexcept { return segment_; }

private:
    std::size_t scale_;
    std::size_t segment_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace mfdfa
