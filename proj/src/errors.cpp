#include "packetlab/errors.hpp"

namespace packetlab {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonSquare: return "NonSquare";
    case ErrorCode::SingularOrUnit: return "SingularOrUnit";
    case ErrorCode::NotExpanding: return "NotExpanding";
    case ErrorCode::InvalidDigitSet: return "InvalidDigitSet";
    case ErrorCode::InternalInconsistency: return "InternalInconsistency";
    case ErrorCode::SizeOverflow: return "SizeOverflow";
    case ErrorCode::ChannelOutOfRange: return "ChannelOutOfRange";
    case ErrorCode::NotUnitary: return "NotUnitary";
    case ErrorCode::NotOrthonormal: return "NotOrthonormal";
    case ErrorCode::LowPassNotIsometric: return "LowPassNotIsometric";
    case ErrorCode::LevelZero: return "LevelZero";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::DepthExceedsLevel: return "DepthExceedsLevel";
    case ErrorCode::InadmissibleBasis: return "InadmissibleBasis";
    case ErrorCode::MissingNode: return "MissingNode";
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::IncompleteTree: return "IncompleteTree";
    case ErrorCode::EigenFailure: return "EigenFailure";
    case ErrorCode::InvalidBounds: return "InvalidBounds";
    case ErrorCode::UnknownCost: return "UnknownCost";
    case ErrorCode::FormatError: return "FormatError";
    case ErrorCode::Usage: return "Usage";
  }
  return "Unknown";
}

}  // namespace packetlab
