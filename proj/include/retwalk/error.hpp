#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace retwalk {

enum class ErrorCode {
    RowSumError,
    NegativeProbability,
    IndexOutOfRange,
    DuplicateEntry,
    NotStronglyConnected,
    TooSmall,
    ParseError,
    SpecInvalid,
    Overflow,
    OutOfRange,
    NoConvergence,
    SingularSystem,
    DenseCapExceeded,
    AllTruncated,
    IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

/// One violated invariant found by a validation pass.
struct Violation {
    ErrorCode code;
    std::optional<std::size_t> row;  // offending row, when the violation is row-local
    std::string detail;
};

using ValidationReport = std::vector<Violation>;

inline bool contains(const ValidationReport& report, ErrorCode code) {
    for (const auto& v : report)
        if (v.code == code) return true;
    return false;
}

}  // namespace retwalk
