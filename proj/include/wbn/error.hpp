#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace wbn {

enum class ErrorCode {
    BadMagic,
    Truncated,
    BadLabel,
    InsufficientData,
    IndexOutOfRange,
    BatchTooSmall,
    EmptyClass,
    ShapeMismatch,
    DegenerateWeightMass,
    CacheMismatch,
    NoStats,
    StatsUnpopulated,
    NonDeterministicLoss,
    InvalidArgument,
    InvalidConfig,
    Io,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what);

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

} // namespace wbn
