#pragma once

#include <stdexcept>
#include <string>

namespace drank {

// Failure taxonomy shared across the library. Codes let callers and tests
// distinguish failure modes without parsing messages.
enum class Err {
  EmptyNegatives,
  OutOfRange,
  NonFinite,
  BadBase,
  EmptyInput,
  BadPriorMask,
  NoPositives,
  StepOutOfRange,
  BadAlpha,
  BadSpec,
  BadConfig,
  DivergenceDetected,
};

const char* to_string(Err code);

class DrError : public std::runtime_error {
 public:
  DrError(Err code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  Err code() const { return code_; }

 private:
  Err code_;
};

}  // namespace drank
