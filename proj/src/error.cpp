#include "qchan/error.hpp"

namespace qchan {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid-argument";
    case ErrorKind::internal_error: return "internal-error";
    case ErrorKind::resource_limit: return "resource-limit";
    case ErrorKind::degenerate_postselection: return "degenerate-postselection";
    case ErrorKind::invalid_channel: return "invalid-channel";
  }
  return "unknown";
}

}  // namespace qchan
