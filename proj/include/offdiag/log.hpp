#ifndef OFFDIAG_LOG_HPP
#define OFFDIAG_LOG_HPP

#include <cstdlib>
#include <cstring>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>

namespace offdiag::log {

enum class level : int { error = 0, warn = 1, info = 2, debug = 3 };

/// Verbosity is controlled by the OFFDIAG_LOG environment variable
/// (error|warn|info|debug). Default is warn.
inline level threshold() {
    static const level lvl = [] {
        const char* env = std::getenv("OFFDIAG_LOG");
        if (env == nullptr) return level::warn;
        if (std::strcmp(env, "error") == 0) return level::error;
        if (std::strcmp(env, "warn") == 0) return level::warn;
        if (std::strcmp(env, "info") == 0) return level::info;
        if (std::strcmp(env, "debug") == 0) return level::debug;
        return level::warn;
    }();
    return lvl;
}

inline std::mutex& mutex() {
    static std::mutex m;
    return m;
}

inline void emit(level lvl, const std::string& msg) {
    if (static_cast<int>(lvl) > static_cast<int>(threshold())) return;
    static const char* names[] = {"error", "warn", "info", "debug"};
    std::lock_guard<std::mutex> lock(mutex());
    std::cerr << "[offdiag:" << names[static_cast<int>(lvl)] << "] " << msg << '\n';
}

inline void error(const std::string& m) { emit(level::error, m); }
inline void warn(const std::string& m) { emit(level::warn, m); }
inline void info(const std::string& m) { emit(level::info, m); }
inline void debug(const std::string& m) { emit(level::debug, m); }

} // namespace offdiag::log

#endif
