#ifndef PACKETLAB_ERRORS_HPP
#define PACKETLAB_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace packetlab {

enum class ErrorCode {
  NonSquare,
  SingularOrUnit,
  NotExpanding,
  InvalidDigitSet,
  InternalInconsistency,
  SizeOverflow,
  ChannelOutOfRange,
  NotUnitary,
  NotOrthonormal,
  LowPassNotIsometric,
  LevelZero,
  ShapeMismatch,
  DepthExceedsLevel,
  InadmissibleBasis,
  MissingNode,
  Overflow,
  IncompleteTree,
  EigenFailure,
  InvalidBounds,
  UnknownCost,
  FormatError,
  Usage,
};

std::string_view error_code_name(ErrorCode code);

/// All library failures are reported through this exception. The code
/// identifies the failure class; the message carries the specifics.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace packetlab

#endif  // PACKETLAB_ERRORS_HPP
