#include "drank/error.hpp"

namespace drank {

const char* to_string(Err code) {
  switch (code) {
    case Err::EmptyNegatives:
      return "EmptyNegatives";
    case Err::OutOfRange:
      return "OutOfRange";
    case Err::NonFinite:
      return "NonFinite";
    case Err::BadBase:
      return "BadBase";
    case Err::EmptyInput:
      return "EmptyInput";
    case Err::BadPriorMask:
      return "BadPriorMask";
    case Err::NoPositives:
      return "NoPositives";
    case Err::StepOutOfRange:
      return "StepOutOfRange";
    case Err::BadAlpha:
      return "BadAlpha";
    case Err::BadSpec:
      return "BadSpec";
    case Err::BadConfig:
      return "BadConfig";
    case Err::DivergenceDetected:
      return "DivergenceDetected";
  }
  return "UnknownError";
}

}  // namespace drank
