#pragma once

#include <atomic>
#include <iostream>
#include <string_view>

namespace mmho {

enum class LogLevel { quiet = 0, warn = 1, info = 2 };

inline std::atomic<int>& log_level_storage() {
  static std::atomic<int> level{static_cast<int>(LogLevel::warn)};
  return level;
}

inline void set_log_level(LogLevel level) { log_level_storage() = static_cast<int>(level); }

inline void log_warn(std::string_view msg) {
  if (log_level_storage() >= static_cast<int>(LogLevel::warn)) std::clog << "[warn] " << msg << '\n';
}

inline void log_info(std::string_view msg) {
  if (log_level_storage() >= static_cast<int>(LogLevel::info)) std::clog << "[info] " << msg << '\n';
}

}  // namespace mmho
