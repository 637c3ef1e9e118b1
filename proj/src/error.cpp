#include "mfdfa/error.hpp"

namespace mfdfa {

const char* error_code_name(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::Ok: return "ok";
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::Format: return "format";
    case ErrorCode::UnsupportedCodec: return "unsupported-codec";
    case ErrorCode::EmptySignal: return "empty-signal";
    case ErrorCode::Bounds: return "bounds";
    case ErrorCode::InsufficientAudio: return "insufficient-audio";
    case ErrorCode::Data: return "data";
    case ErrorCode::DegenerateSegment: return "degenerate-segment";
    case ErrorCode::InsufficientScales: return "insufficient-scales";
    case ErrorCode::NonConcaveSpectrum: return "non-concave-spectrum";
    case ErrorCode::InsufficientSpectrum: return "insufficient-spectrum";
    case ErrorCode::Config: return "config";
    case ErrorCode::Schema: return "schema";
    case ErrorCode::ManifestParse: return "manifest-parse";
    case ErrorCode::DuplicateEntry: return "duplicate-entry";
    case ErrorCode::MissingFile: return "missing-file";
    case ErrorCode::Io: return "io";
    case ErrorCode::RenditionFailed: return "rendition-failed";
    case ErrorCode::Internal: return "internal";
    }
    return "unknown";
}

}  // namespace mfdfa
