#include "toolflow/log.hpp"

#include <atomic>
#include <cstdlib>
#include <iostream>
#include <mutex>
#include <string>

namespace toolflow {

namespace {

LogLevel level_from_env() {
    const char* env = std::getenv("TOOLFLOW_LOG");
    if (!env) return LogLevel::Warn;
    std::string v(env);
    if (v == "debug") return LogLevel::Debug;
    if (v == "info") return LogLevel::Info;
    if (v == "error") return LogLevel::Error;
    if (v == "off") return LogLevel::Off;
    return LogLevel::Warn;
}

std::atomic<LogLevel>& current_level() {
    static std::atomic<LogLevel> level{level_from_env()};
    return level;
}

const char* tag(LogLevel level) {
    switch (level) {
        case LogLevel::Debug: return "debug";
        case LogLevel::Info: return "info";
        case LogLevel::Warn: return "warn";
        case LogLevel::Error: return "error";
        case LogLevel::Off: break;
    }
    return "";
}

}  // namespace

LogLevel log_level() noexcept { return current_level().load(); }

void set_log_level(LogLevel level) noexcept { current_level().store(level); }

void log(LogLevel level, std::string_view message) {
    if (level == LogLevel::Off || level < log_level()) return;
    static std::mutex mu;
    std::lock_guard lock(mu);
    std::cerr << "[toolflow " << tag(level) << "] " << message << '\n';
}

}  // namespace toolflow
