#pragma once

#include <stdexcept>
#include <string>

namespace wsol {

// Every failure surfaced by the library is one of these. The kind decides the
// CLI exit code, so keep the set small and stable.
enum class ErrorKind {
  kInvalidArgument,  // violated precondition on an input value
  kInvalidData,      // malformed file contents or inconsistent dataset
  kIo,               // file could not be opened, read or written
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void throw_invalid_argument(const std::string& message) {
  throw Error(ErrorKind::kInvalidArgument, message);
}

[[noreturn]] inline void throw_invalid_data(const std::string& message) {
  throw Error(ErrorKind::kInvalidData, message);
}

[[noreturn]] inline void throw_io(const std::string& message) {
  throw Error(ErrorKind::kIo, message);
}

}  // namespace wsol
