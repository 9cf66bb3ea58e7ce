#include "retwalk/error.hpp"

namespace retwalk {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::RowSumError: return "RowSumError";
    case ErrorCode::NegativeProbability: return "NegativeProbability";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::DuplicateEntry: return "DuplicateEntry";
    case ErrorCode::NotStronglyConnected: return "NotStronglyConnected";
    case ErrorCode::TooSmall: return "TooSmall";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::SpecInvalid: return "SpecInvalid";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::DenseCapExceeded: return "DenseCapExceeded";
    case ErrorCode::AllTruncated: return "AllTruncated";
    case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

}  // namespace retwalk
