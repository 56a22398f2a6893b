#include "wbn/error.hpp"

namespace wbn {

std::string_view to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::BadMagic: return "BadMagic";
    case ErrorCode::Truncated: return "Truncated";
    case ErrorCode::BadLabel: return "BadLabel";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::BatchTooSmall: return "BatchTooSmall";
    case ErrorCode::EmptyClass: return "EmptyClass";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::DegenerateWeightMass: return "DegenerateWeightMass";
    case ErrorCode::CacheMismatch: return "CacheMismatch";
    case ErrorCode::NoStats: return "NoStats";
    case ErrorCode::StatsUnpopulated: return "StatsUnpopulated";
    case ErrorCode::NonDeterministicLoss: return "NonDeterministicLoss";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code)
{
}

void fail(ErrorCode code, const std::string& what)
{
    throw Error(code, what);
}

} // namespace wbn
