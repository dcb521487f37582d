#include "snapgate/log.hpp"

#include <cstdlib>
#include <iostream>
#include <mutex>
#include <string>

namespace snapgate {
namespace {

LogLevel level_from_env() {
  const char* env = std::getenv("SNAPGATE_LOG");
  if (env == nullptr) return LogLevel::Warn;
  const std::string value(env);
  if (value == "error") return LogLevel::Error;
  if (value == "info") return LogLevel::Info;
  if (value == "debug") return LogLevel::Debug;
  return LogLevel::Warn;
}

struct LogState {
  std::mutex mutex;
  LogLevel level = level_from_env();
  LogSink sink;
};

LogState& state() {
  static LogState s;
  return s;
}

const char* tag(LogLevel level) {
  switch (level) {
    case LogLevel::Error: return "error";
    case LogLevel::Warn: return "warn";
    case LogLevel::Info: return "info";
    case LogLevel::Debug: return "debug";
  }
  return "?";
}

}  // namespace

LogLevel log_level() {
  std::lock_guard lock(state().mutex);
  return state().level;
}

void set_log_level(LogLevel level) {
  std::lock_guard lock(state().mutex);
  state().level = level;
}

void set_log_sink(LogSink sink) {
  std::lock_guard lock(state().mutex);
  state().sink = std::move(sink);
}

void log(LogLevel level, std::string_view message) {
  std::lock_guard lock(state().mutex);
  if (state().sink) {
    state().sink(level, message);
    return;
  }
  if (level > state().level) return;
  std::cerr << "snapgate " << tag(level) << ": " << message << '\n';
}

}  // namespace snapgate
