#pragma once

#include <functional>
#include <string_view>

namespace snapgate {

enum class LogLevel { Error = 0, Warn = 1, Info = 2, Debug = 3 };

/// Verbosity is read once from SNAPGATE_LOG (error|warn|info|debug), default warn.
LogLevel log_level();
void set_log_level(LogLevel level);

using LogSink = std::function<void(LogLevel, std::string_view)>;

/// Replaces the stderr sink; pass an empty function to restore it.
void set_log_sink(LogSink sink);

void log(LogLevel level, std::string_view message);

inline void log_warn(std::string_view message) { log(LogLevel::Warn, message); }
inline void log_info(std::string_view message) { log(LogLevel::Info, message); }

}  // namespace snapgate
