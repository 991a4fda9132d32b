#pragma once

#include <cstdio>
#include <utility>

#include <fmt/format.h>

namespace polystab {

enum class LogLevel { kError = 0, kInfo = 1, kDebug = 2 };

/// Read once from POLY_STAB_LOG (error|info|debug); defaults to error.
LogLevel log_level();
/// Overrides the environment, mainly for tests.
void set_log_level(LogLevel level);

template <typename... Args>
void log_error(fmt::format_string<Args...> f, Args&&... args) {
  fmt::print(stderr, "[error] {}\n", fmt::format(f, std::forward<Args>(args)...));
}

template <typename... Args>
void log_info(fmt::format_string<Args...> f, Args&&... args) {
  if (log_level() >= LogLevel::kInfo) {
    fmt::print(stderr, "[info] {}\n", fmt::format(f, std::forward<Args>(args)...));
  }
}

template <typename... Args>
void log_debug(fmt::format_string<Args...> f, Args&&... args) {
  if (log_level() >= LogLevel::kDebug) {
    fmt::print(stderr, "[debug] {}\n", fmt::format(f, std::forward<Args>(args)...));
  }
}

}  // namespace polystab
