#include "g2tr/error.hpp"

namespace g2tr {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidConfig: return "InvalidConfig";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::MissingSideInput: return "MissingSideInput";
        case ErrorCode::MalformedSpec: return "MalformedSpec";
        case ErrorCode::BadMagic: return "BadMagic";
        case ErrorCode::BadVersion: return "BadVersion";
        case ErrorCode::BadHeader: return "BadHeader";
        case ErrorCode::TruncatedFile: return "TruncatedFile";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::Io: return "Io";
        case ErrorCode::Internal: return "Internal";
    }
    return "Unknown";
}

}  // namespace g2tr
