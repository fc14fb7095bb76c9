#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace shehu {

enum class ErrorKind {
  Syntax,               // malformed input text
  KindMismatch,         // function-domain vs transform-domain confusion
  Usage,                // bad arguments to an operation or command
  Domain,               // numeric evaluation outside the supported domain
  Pole,                 // a denominator vanishes at the evaluation point
  Algebra,              // result would leave the atom algebra
  Untransformable,      // no closed-form forward image
  NoClosedFormInverse,  // image matches no inverse pattern
  OutsideRegion,        // point outside the convergence region
  MissingCondition,     // a rule needs a boundary trace that was not supplied
  VerificationFailed,   // a result failed its numeric verification
};

std::string_view to_string(ErrorKind kind);

// True for failures of the mathematics (exit code 2) rather than of the input.
bool is_math_failure(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t position, const std::string& message)
      : Error(ErrorKind::Syntax, message + " at position " + std::to_string(position)),
        position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace shehu
