#pragma once

#include <stdexcept>
#include <string>

namespace aggmarket {

// Error categories. Input/validation problems map to CLI exit code 2,
// degenerate markets (e.g. a task nobody answers) to exit code 3.
enum class Errc {
  InvalidSpec,
  LengthMismatch,
  IndexOutOfRange,
  DimensionMismatch,
  CapViolation,
  TooManyTasks,
  TooManyModels,
  Parse,
  DuplicateModel,
  ScoreOutOfRange,
  Io,
  AllAbstain,
  AbstainAgent,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, std::string message)
      : std::runtime_error(std::move(message)), code_(code) {}

  Errc code() const noexcept { return code_; }

  int exit_code() const noexcept {
    switch (code_) {
      case Errc::AllAbstain:
      case Errc::AbstainAgent:
        return 3;
      default:
        return 2;
    }
  }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace aggmarket
