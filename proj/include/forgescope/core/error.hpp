#pragma once

#include <stdexcept>
#include <string>

namespace forgescope {

// Every failure mode the library reports. Tests match on the code, not the
// message, so codes are part of the public contract.
enum class ErrorCode {
  // image_io
  FileNotFound,
  UnsupportedFormat,
  CorruptImage,
  UnsupportedJpeg,
  CorruptStream,
  NotAJpeg,
  IoError,
  // datasets
  RootNotFound,
  LayoutMismatch,
  CountMismatch,
  IndexOutOfRange,
  DctRequestedForNonJpeg,
  // preprocessing
  MissingKey,
  WrongChannelCount,
  ZeroStd,
  MissingInputKey,
  MissingOutputKey,
  // methods
  UnknownMethod,
  InvalidConfig,
  ImageTooSmall,
  // metrics
  ShapeMismatch,
  RangeError,
  EmptyAccumulator,
  SingleClass,
  AllSkipped,
  UnknownMetric,
  // postprocessing
  NonFiniteInput,
  DownscaleNotSupported,
  // benchmark
  CorruptOutput,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

private:
  ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace forgescope
