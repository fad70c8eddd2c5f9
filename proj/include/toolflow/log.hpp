#pragma once

#include <string_view>

namespace toolflow {

enum class LogLevel { Debug, Info, Warn, Error, Off };

/// Initial level comes from TOOLFLOW_LOG (debug|info|warn|error|off), default warn.
LogLevel log_level() noexcept;
void set_log_level(LogLevel level) noexcept;
void log(LogLevel level, std::string_view message);

inline void log_debug(std::string_view m) { log(LogLevel::Debug, m); }
inline void log_info(std::string_view m) { log(LogLevel::Info, m); }
inline void log_warn(std::string_view m) { log(LogLevel::Warn, m); }

}  // namespace toolflow
