#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace coherelint {

enum class ErrorKind {
    InvalidArgument,
    Io,
    MissingColumn,
    MalformedRow,
    BadLabel,
    DuplicateId,
    InvalidPair,
    EmptyFile,
    TooFewPairs,
    EmptyCorpus,
    BadHeader,
    DimensionMismatch,
    TruncatedFile,
    NonFiniteActivation,
    NonFiniteGradient,
    VersionMismatch,
    CorruptFile,
    SingleClassTrainingSet,
    LengthMismatch,
};

constexpr std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Io: return "Io";
    case ErrorKind::MissingColumn: return "MissingColumn";
    case ErrorKind::MalformedRow: return "MalformedRow";
    case ErrorKind::BadLabel: return "BadLabel";
    case ErrorKind::DuplicateId: return "DuplicateId";
    case ErrorKind::InvalidPair: return "InvalidPair";
    case ErrorKind::EmptyFile: return "EmptyFile";
    case ErrorKind::TooFewPairs: return "TooFewPairs";
    case ErrorKind::EmptyCorpus: return "EmptyCorpus";
    case ErrorKind::BadHeader: return "BadHeader";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::TruncatedFile: return "TruncatedFile";
    case ErrorKind::NonFiniteActivation: return "NonFiniteActivation";
    case ErrorKind::NonFiniteGradient: return "NonFiniteGradient";
    case ErrorKind::VersionMismatch: return "VersionMismatch";
    case ErrorKind::CorruptFile: return "CorruptFile";
    case ErrorKind::SingleClassTrainingSet: return "SingleClassTrainingSet";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    }
    return "Unknown";
}

/// Numeric failures are runtime errors; everything else is a validation error.
constexpr bool is_numeric(ErrorKind kind) {
    return kind == ErrorKind::NonFiniteActivation || kind == ErrorKind::NonFiniteGradient;
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

inline void require(bool condition, const std::string& message) {
    if (!condition) throw Error(ErrorKind::InvalidArgument, message);
}

}  // namespace coherelint
