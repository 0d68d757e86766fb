#include "coboson/errors.hpp"

namespace coboson {

const char* error_kind_name(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::parse: return "parse_error";
    case ErrorKind::validation: return "validation_error";
    case ErrorKind::domain: return "domain_error";
    case ErrorKind::accuracy: return "accuracy_error";
    case ErrorKind::io: return "io_error";
  }
  return "error";
}

}  // namespace coboson
