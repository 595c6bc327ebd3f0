#pragma once

#include <functional>
#include <string_view>

namespace ghostdiff {

using WarningHandler = std::function<void(std::string_view)>;

/// Emits a non-fatal numerical warning through the installed handler
/// (stderr by default).
void warn(std::string_view message);

/// Installs `handler` and returns the previous one.
WarningHandler set_warning_handler(WarningHandler handler);

/// Restores the previous handler on scope exit.
class ScopedWarningHandler {
 public:
  explicit ScopedWarningHandler(WarningHandler handler)
      : previous_(set_warning_handler(std::move(handler))) {}
  ~ScopedWarningHandler() { set_warning_handler(std::move(previous_)); }
  ScopedWarningHandler(const ScopedWarningHandler&) = delete;
  ScopedWarningHandler& operator=(const ScopedWarningHandler&) = delete;

 private:
  WarningHandler previous_;
};

/// Worker count for internally parallel operations: GHOSTDIFF_THREADS when
/// set to a positive integer, otherwise the hardware concurrency.
int thread_budget();

}  // namespace ghostdiff
