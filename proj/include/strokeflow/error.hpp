#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace strokeflow {

enum class ErrorCode {
    MalformedXml,
    UnsupportedFeature,
    BadPathData,
    EmptyImage,
    TooManyColors,
    DegenerateContour,
    EmptySet,
    NoStrokes,
    NegativeDistance,
    InvalidArgument,
    Io,
    InvariantViolation,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::MalformedXml: return "MalformedXml";
    case ErrorCode::UnsupportedFeature: return "UnsupportedFeature";
    case ErrorCode::BadPathData: return "BadPathData";
    case ErrorCode::EmptyImage: return "EmptyImage";
    case ErrorCode::TooManyColors: return "TooManyColors";
    case ErrorCode::DegenerateContour: return "DegenerateContour";
    case ErrorCode::EmptySet: return "EmptySet";
    case ErrorCode::NoStrokes: return "NoStrokes";
    case ErrorCode::NegativeDistance: return "NegativeDistance";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Io: return "Io";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
    }
    return "Unknown";
}

/// Every failure surfaced by the library. The message is prefixed with the
/// code name so command-line users can grep for it.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& detail)
        : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

    /// Input errors are the caller's fault; invariant violations are ours.
    bool is_internal() const noexcept { return code_ == ErrorCode::InvariantViolation; }

private:
    ErrorCode code_;
};

/// Path-data grammar violation with the byte offset into the d attribute.
class BadPathData : public Error {
public:
    BadPathData(std::size_t offset, const std::string& what)
        : Error(ErrorCode::BadPathData, what + " at offset " + std::to_string(offset)),
          offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& detail) {
    throw Error(code, detail);
}

inline void require(bool condition, ErrorCode code, const std::string& detail) {
    if (!condition) fail(code, detail);
}

} // namespace strokeflow
