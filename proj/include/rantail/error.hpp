#pragma once

#include <stdexcept>
#include <string>

namespace rantail {

enum class ErrorKind {
  EmptyTrace,
  MalformedLine,
  MissingColumn,
  EmptySequence,
  LengthMismatch,
  TooFewPoints,
  RunTooShort,
  SplitOutOfRange,
  EmptyPhase,
  InvalidSpec,
  InvalidConfig,
  Io,
};

const char* to_string(ErrorKind kind) noexcept;

// Every failure surfaced by the library carries a kind so callers (and
// tests) can branch on it without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace rantail
