#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace vtl {

/// Base error for all library failures. Messages are prefixed with the
/// subsystem that raised them ("tl-core: ...", "trace-io: ...").
class Error : public std::runtime_error {
public:
  Error(std::string subsystem, const std::string& message)
      : std::runtime_error(subsystem + ": " + message),
        subsystem_(std::move(subsystem)) {}

  const std::string& subsystem() const noexcept { return subsystem_; }

private:
  std::string subsystem_;
};

/// Raised by the specification parser; carries the character offset of the
/// offending token.
class ParseError : public Error {
public:
  ParseError(std::size_t position, const std::string& message)
      : Error("tl-core", "at position " + std::to_string(position) + ": " + message),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

private:
  std::size_t position_;
};

/// Malformed user input outside the spec language: bad CLI values, missing
/// config fields. The CLI maps this to exit code 2.
class UsageError : public Error {
public:
  explicit UsageError(const std::string& message) : Error("usage", message) {}
};

}  // namespace vtl
