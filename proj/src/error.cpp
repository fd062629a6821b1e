#include "bustop/error.hpp"

namespace bustop {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingFile: return "MissingFile";
    case ErrorCode::MalformedRecord: return "MalformedRecord";
    case ErrorCode::NonMonotonicTimestamp: return "NonMonotonicTimestamp";
    case ErrorCode::WrongSampleRate: return "WrongSampleRate";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::DegenerateGravity: return "DegenerateGravity";
    case ErrorCode::WindowTooShort: return "WindowTooShort";
    case ErrorCode::NoAudioInWindow: return "NoAudioInWindow";
    case ErrorCode::NoMotionBeforeStay: return "NoMotionBeforeStay";
    case ErrorCode::NoImuInWindow: return "NoImuInWindow";
    case ErrorCode::MissingFeature: return "MissingFeature";
    case ErrorCode::MissingTile: return "MissingTile";
    case ErrorCode::EmptyDataset: return "EmptyDataset";
    case ErrorCode::SingleClassDataset: return "SingleClassDataset";
    case ErrorCode::TooFewMinoritySamples: return "TooFewMinoritySamples";
    case ErrorCode::InsufficientClassSupport: return "InsufficientClassSupport";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::EmptyTrainingSet: return "EmptyTrainingSet";
    case ErrorCode::NoCommonTrips: return "NoCommonTrips";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::UsageError: return "UsageError";
  }
  return "Unknown";
}

}  // namespace bustop
