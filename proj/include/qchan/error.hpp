#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qchan {

enum class ErrorKind {
  invalid_argument,
  internal_error,
  resource_limit,
  degenerate_postselection,
  invalid_channel,
};

std::string_view to_string(ErrorKind kind) noexcept;

// Every failure raised by the library carries one of the categories above.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace qchan
