#include "polystab/log.h"

#include <atomic>
#include <cstdlib>
#include <string>

namespace polystab {

namespace {

LogLevel level_from_env() {
  const char* env = std::getenv("POLY_STAB_LOG");
  if (env == nullptr) return LogLevel::kError;
  const std::string s(env);
  if (s == "debug") return LogLevel::kDebug;
  if (s == "info") return LogLevel::kInfo;
  return LogLevel::kError;
}

std::atomic<int>& level_storage() {
  static std::atomic<int> level(static_cast<int>(level_from_env()));
  return level;
}

}  // namespace

LogLevel log_level() { return static_cast<LogLevel>(level_storage().load()); }

void set_log_level(LogLevel level) { level_storage().store(static_cast<int>(level)); }

}  // namespace polystab
