#pragma once

#include <stdexcept>
#include <string>

namespace avm {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed user input: bad tables, unknown identifiers, parse failures.
class InputError : public Error {
 public:
  using Error::Error;
};

// An operation needs structure the algebra does not carry (e.g. no star).
class CapabilityError : public Error {
 public:
  using Error::Error;
};

// A configured budget would be exceeded.
class ResourceError : public Error {
 public:
  using Error::Error;
};

// An internal invariant was observed to be broken.
class InvariantError : public Error {
 public:
  using Error::Error;
};

class ParseError : public InputError {
 public:
  ParseError(const std::string& message, std::size_t position)
      : InputError(message + " at offset " + std::to_string(position)),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

}  // namespace avm
