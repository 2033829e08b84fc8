#pragma once

#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace sadapt {

// Non-fatal conditions (degenerate features, rank-deficient covariances,
// heuristic fallbacks) are routed through a process-wide warning handler.
// The default handler writes "warning: <msg>" to stderr.
using WarningHandler = std::function<void(std::string_view)>;

void warn(std::string_view message);

/// Installs `handler` and returns the previous one.
WarningHandler set_warning_handler(WarningHandler handler);

/// Collects warnings for its lifetime, restoring the previous handler after.
class ScopedWarningCapture {
 public:
  ScopedWarningCapture();
  ~ScopedWarningCapture();
  ScopedWarningCapture(const ScopedWarningCapture&) = delete;
  ScopedWarningCapture& operator=(const ScopedWarningCapture&) = delete;

  [[nodiscard]] const std::vector<std::string>& messages() const { return messages_; }
  [[nodiscard]] bool contains(std::string_view needle) const;

 private:
  std::vector<std::string> messages_;
  WarningHandler previous_;
};

}  // namespace sadapt
