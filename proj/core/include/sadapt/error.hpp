#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sadapt {

enum class ErrorKind {
  kInvalidArgument,
  kDimensionMismatch,
  kParse,
  kIo,
  kNotFound,
  kNumerical,
  kOverdamped,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Single exception type for the library; `kind()` is what the CLI reports
/// in its machine-readable error output.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace sadapt
