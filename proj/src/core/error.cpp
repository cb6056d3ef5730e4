#include "forgescope/core/error.hpp"

namespace forgescope {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::FileNotFound: return "FileNotFound";
    case ErrorCode::UnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::CorruptImage: return "CorruptImage";
    case ErrorCode::UnsupportedJpeg: return "UnsupportedJpeg";
    case ErrorCode::CorruptStream: return "CorruptStream";
    case ErrorCode::NotAJpeg: return "NotAJpeg";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::RootNotFound: return "RootNotFound";
    case ErrorCode::LayoutMismatch: return "LayoutMismatch";
    case ErrorCode::CountMismatch: return "CountMismatch";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::DctRequestedForNonJpeg: return "DctRequestedForNonJpeg";
    case ErrorCode::MissingKey: return "MissingKey";
    case ErrorCode::WrongChannelCount: return "WrongChannelCount";
    case ErrorCode::ZeroStd: return "ZeroStd";
    case ErrorCode::MissingInputKey: return "MissingInputKey";
    case ErrorCode::MissingOutputKey: return "MissingOutputKey";
    case ErrorCode::UnknownMethod: return "UnknownMethod";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::ImageTooSmall: return "ImageTooSmall";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::RangeError: return "RangeError";
    case ErrorCode::EmptyAccumulator: return "EmptyAccumulator";
    case ErrorCode::SingleClass: return "SingleClass";
    case ErrorCode::AllSkipped: return "AllSkipped";
    case ErrorCode::UnknownMetric: return "UnknownMetric";
    case ErrorCode::NonFiniteInput: return "NonFiniteInput";
    case ErrorCode::DownscaleNotSupported: return "DownscaleNotSupported";
    case ErrorCode::CorruptOutput: return "CorruptOutput";
  }
  return "Unknown";
}

}  // namespace forgescope
