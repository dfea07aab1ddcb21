#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace confik {

enum class ErrorKind {
  UnsatContext,
  UnsatInput,
  UnsatModel,
  TooLarge,
  SyntaxError,
  SemanticError,
  AlreadyAssigned,
  InconsistentDecision,
  NotAUserDecision,
  UnknownVariable,
  NoSolutions,
  InvalidPreference,
  Usage,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries a machine-readable kind so
/// frontends (CLI exit codes, HTTP status codes) can map it without parsing
/// the message.
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string &message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

} // namespace confik
