#include "bundlelearn/core.hpp"

namespace bundlelearn {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::StateNotFullRank: return "StateNotFullRank";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::ZeroBias: return "ZeroBias";
    case ErrorCode::AnchorParallel: return "AnchorParallel";
    case ErrorCode::NotOrthogonal: return "NotOrthogonal";
    case ErrorCode::SignViolation: return "SignViolation";
    case ErrorCode::DegenerateInteraction: return "DegenerateInteraction";
    case ErrorCode::SingularAugmentedZ: return "SingularAugmentedZ";
    case ErrorCode::StrategyInfeasible: return "StrategyInfeasible";
    case ErrorCode::NeverFullRank: return "NeverFullRank";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::DuplicateItemInRecord: return "DuplicateItemInRecord";
    case ErrorCode::SinkWriteFailure: return "SinkWriteFailure";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace bundlelearn
