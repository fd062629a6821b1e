#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bustop {

enum class ErrorCode {
  MissingFile,
  MalformedRecord,
  NonMonotonicTimestamp,
  WrongSampleRate,
  InsufficientSamples,
  DegenerateGravity,
  WindowTooShort,
  NoAudioInWindow,
  NoMotionBeforeStay,
  NoImuInWindow,
  MissingFeature,
  MissingTile,
  EmptyDataset,
  SingleClassDataset,
  TooFewMinoritySamples,
  InsufficientClassSupport,
  LengthMismatch,
  EmptyTrainingSet,
  NoCommonTrips,
  InvalidArgument,
  UsageError,
};

std::string_view to_string(ErrorCode code);

// Every library failure surfaces as this exception. The code is what callers
// branch on; the message is for humans and for the CLI's diagnostic line.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace bustop
