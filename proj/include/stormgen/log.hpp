#pragma once

#include <cstdio>
#include <cstdlib>
#include <string>

namespace stormgen {

enum class LogLevel : int { error = 0, warn = 1, info = 2, debug = 3 };

inline LogLevel parse_log_level(const char* text) {
    if (!text) return LogLevel::warn;
    const std::string s(text);
    if (s == "error") return LogLevel::error;
    if (s == "warn" || s == "warning") return LogLevel::warn;
    if (s == "info") return LogLevel::info;
    if (s == "debug") return LogLevel::debug;
    return LogLevel::warn;
}

// Level comes from the STORMGEN_LOG environment variable, read once.
inline LogLevel log_level() {
    static const LogLevel level = parse_log_level(std::getenv("STORMGEN_LOG"));
    return level;
}

inline void log(LogLevel level, const std::string& message) {
    if (static_cast<int>(level) > static_cast<int>(log_level())) return;
    const char* tag = "warn";
    switch (level) {
        case LogLevel::error: tag = "error"; break;
        case LogLevel::warn: tag = "warn"; break;
        case LogLevel::info: tag = "info"; break;
        case LogLevel::debug: tag = "debug"; break;
    }
    std::fprintf(stderr, "stormgen [%s] %s\n", tag, message.c_str());
}

inline void log_info(const std::string& message) { log(LogLevel::info, message); }
inline void log_warn(const std::string& message) { log(LogLevel::warn, message); }
inline void log_debug(const std::string& message) { log(LogLevel::debug, message); }

} // namespace stormgen
