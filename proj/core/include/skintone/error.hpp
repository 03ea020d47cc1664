#pragma once

#include <stdexcept>
#include <string>

namespace skintone {

enum class ErrorCode {
  kDomain,
  kParse,
  kIo,
  kRegionExtraction,
  kBackgroundUnavailable,
  kBackgroundTooDark,
  kSegmentationFailed,
  kInsufficientPixels,
  kInsufficientData,
  kPrecondition,
  kDegenerateFit,
  kInit,
  kNumericalFailure,
  kClipping,
  kMetricUnavailable,
  kUsage,
};

const char* to_string(ErrorCode code);

// Base of every error thrown by the library. The code lets callers (the CLI,
// batch drivers) turn failures into skip reasons without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class NumericalFailure : public Error {
 public:
  NumericalFailure(int iteration, const std::string& what)
      : Error(ErrorCode::kNumericalFailure, what), iteration_(iteration) {}

  int iteration() const noexcept { return iteration_; }

 private:
  int iteration_;
};

}  // namespace skintone
