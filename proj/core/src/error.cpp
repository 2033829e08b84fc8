#include "sadapt/error.hpp"

namespace sadapt {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "invalid_argument";
    case ErrorKind::kDimensionMismatch: return "dimension_mismatch";
    case ErrorKind::kParse: return "parse_error";
    case ErrorKind::kIo: return "io_error";
    case ErrorKind::kNotFound: return "not_found";
    case ErrorKind::kNumerical: return "numerical_failure";
    case ErrorKind::kOverdamped: return "overdamped_mode";
  }
  return "unknown";
}

}  // namespace sadapt
