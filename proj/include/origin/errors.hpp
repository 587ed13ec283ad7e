#pragma once

#include <stdexcept>
#include <string>

namespace origin {

// Every failure the library can raise, one code per spec-level error name.
enum class Errc {
    EmptySlot = 1,
    TemplateArityMismatch,
    IdOutOfRange,
    ProviderUnavailable,
    PartialIngest,
    IoFailure,
    SchemaViolation,
    MissingAnswer,
    RemoteTimeout,
    RemoteMalformedResponse,
    InvalidEncoding,
    EmptyDocument,
    EmptyInput,
    CoverageMismatch,
    BudgetTooLarge,
    EmptyRepository,
    EmptyEvalSet,
    InvalidArgument,
};

class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    Errc code() const { return code_; }

private:
    Errc code_;
};

[[noreturn]] inline void raise(Errc code, const std::string& what) {
    throw Error(code, what);
}

inline const char* errc_name(Errc code) {
    switch (code) {
        case Errc::EmptySlot: return "EmptySlot";
        case Errc::TemplateArityMismatch: return "TemplateArityMismatch";
        case Errc::IdOutOfRange: return "IdOutOfRange";
        case Errc::ProviderUnavailable: return "ProviderUnavailable";
        case Errc::PartialIngest: return "PartialIngest";
        case Errc::IoFailure: return "IoFailure";
        case Errc::SchemaViolation: return "SchemaViolation";
        case Errc::MissingAnswer: return "MissingAnswer";
        case Errc::RemoteTimeout: return "RemoteTimeout";
        case Errc::RemoteMalformedResponse: return "RemoteMalformedResponse";
        case Errc::InvalidEncoding: return "InvalidEncoding";
        case Errc::EmptyDocument: return "EmptyDocument";
        case Errc::EmptyInput: return "EmptyInput";
        case Errc::CoverageMismatch: return "CoverageMismatch";
        case Errc::BudgetTooLarge: return "BudgetTooLarge";
        case Errc::EmptyRepository: return "EmptyRepository";
        case Errc::EmptyEvalSet: return "EmptyEvalSet";
        case Errc::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

} // namespace origin
